#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "iclseg/errors.hpp"
#include "iclseg/oracle.hpp"

using namespace iclseg;

TEST_SUITE("oracle") {
  TEST_CASE("enumerate_segmentations examples") {
    const auto five = oracle::enumerate_segmentations(5, 2);
    REQUIRE(five.size() == 4);
    for (std::size_t t = 1; t <= 4; ++t) CHECK(five[t - 1].breakpoints() == std::vector<std::size_t>{t});
    const auto four = oracle::enumerate_segmentations(4, 4);
    REQUIRE(four.size() == 1);
    CHECK(four[0].breakpoints() == std::vector<std::size_t>{1, 2, 3});
    const auto ten = oracle::enumerate_segmentations(10, 3);
    CHECK(ten.size() == 36);
    for (std::size_t j = 1; j < ten.size(); ++j) {
      CHECK(std::lexicographical_compare(ten[j - 1].breakpoints().begin(), ten[j - 1].breakpoints().end(),
                                         ten[j].breakpoints().begin(), ten[j].breakpoints().end()));
    }
    CHECK(oracle::enumerate_segmentations(20, 4).size() == 969);
  }

  TEST_CASE("enumeration refuses large or invalid requests") {
    CHECK_THROWS_AS(oracle::enumerate_segmentations(21, 2), InputError);
    CHECK_THROWS_AS(oracle::enumerate_segmentations(5, 6), InputError);
    CHECK_THROWS_AS(oracle::enumerate_segmentations(5, 0), InputError);
    const std::vector<double> big(21, 1.0);
    EmissionSpec spec;
    spec.means = {1.0};
    CHECK_THROWS_AS(oracle::brute_posterior(big, spec), InputError);
  }

  TEST_CASE("identical parameters give the uniform posterior") {
    const std::vector<double> xs{0, 3, 1, 2, 2, 5, 1};
    EmissionSpec spec;
    spec.means = {2.0, 2.0, 2.0};
    const auto post = oracle::brute_posterior(xs, spec);
    REQUIRE(post.probabilities.size() == 15);
    for (double p : post.probabilities) CHECK(p == doctest::Approx(1.0 / 15).epsilon(1e-14));
    CHECK(post.entropy == doctest::Approx(std::log(15.0)).epsilon(1e-14));
  }

  TEST_CASE("two points in two segments") {
    const std::vector<double> xs{1, 4};
    EmissionSpec spec;
    spec.means = {1.0, 4.0};
    const auto post = oracle::brute_posterior(xs, spec);
    REQUIRE(post.probabilities.size() == 1);
    CHECK(post.probabilities[0] == 1.0);
    CHECK(post.entropy == 0.0);
  }

  TEST_CASE("posterior normalization and entropy bounds on random instances") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto inst = oracle::random_instance(seed);
      const auto post = oracle::brute_posterior(inst.data, inst.emission);
      const double total = std::accumulate(post.probabilities.begin(), post.probabilities.end(), 0.0);
      const std::size_t n = inst.data.size(), K = inst.emission.segment_count();
      const double log_c = std::lgamma(double(n)) - std::lgamma(double(K)) - std::lgamma(double(n - K + 1));
      CHECK(std::abs(total - 1) < 1e-12);
      CHECK(post.entropy >= 0.0);
      CHECK(post.entropy <= log_c + 1e-12);
      CHECK(post.log_joint == doctest::Approx(post.log_normalizer - log_c).epsilon(1e-14));
      const auto best = std::max_element(post.probabilities.begin(), post.probabilities.end());
      CHECK(post.segmentations[best - post.probabilities.begin()] == post.map);
    }
  }

  TEST_CASE("brute_optimal_segmentation examples") {
    SegmentModel m;
    m.family = Family::poisson;
    const std::vector<double> xs{1, 1, 9, 9};
    CHECK(oracle::brute_optimal_segmentation(xs, m, 2).breakpoints() == std::vector<std::size_t>{2});
    const std::vector<double> flat(6, 2.0);
    CHECK(oracle::brute_optimal_segmentation(flat, m, 2).breakpoints() == std::vector<std::size_t>{1});
  }

  TEST_CASE("naive Rand index") {
    const ChangePointSet one = ChangePointSet::single_segment(4);
    const ChangePointSet halves(4, {2});
    CHECK(oracle::naive_rand_index(one, one) == 1.0);
    CHECK(oracle::naive_rand_index(one, halves) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("equivalence check passes") {
    const auto report = oracle::check_equivalence(60, 123);
    CHECK(report.instances == 60);
    CHECK(report.passed(1e-8));
    CHECK(report.max_deviation() < 1e-8);
  }
}
