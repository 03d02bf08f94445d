#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "iclseg/errors.hpp"
#include "iclseg/metrics.hpp"
#include "iclseg/oracle.hpp"
#include "iclseg/random.hpp"
#include "iclseg/simulate.hpp"

using namespace iclseg;

namespace {

ChangePointSet random_segmentation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> bps;
  const double rate = rng.uniform() * 0.3;
  for (std::size_t t = 1; t < n; ++t) {
    if (rng.uniform() < rate) bps.push_back(t);
  }
  return ChangePointSet(n, bps);
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("small design layout") {
    const auto sim = small_design(9.0, 1);
    CHECK(sim.data.size() == 500);
    CHECK(sim.design.truth.breakpoints() == std::vector<std::size_t>{22, 65, 108, 219, 252, 435});
    CHECK(sim.design.truth.segment_count() == 7);
    CHECK(sim.design.means == std::vector<double>{1, 10, 1, 10, 1, 10, 1});
    CHECK(small_design(0.0, 1).design.means == std::vector<double>(7, 1.0));
  }

  TEST_CASE("small design segment means are consistent with the truth") {
    const auto sim = small_design(9.0, 42);
    const auto& cps = sim.design.truth;
    for (std::size_t k = 0; k < cps.segment_count(); ++k) {
      const std::size_t len = cps.segment_end(k) - cps.segment_begin(k);
      double sum = 0;
      for (std::size_t i = cps.segment_begin(k); i < cps.segment_end(k); ++i) sum += sim.data[i];
      const double mean = sim.design.means[k];
      CAPTURE(k);
      CHECK(std::abs(sum / double(len) - mean) < 3 * std::sqrt(mean / double(len)));
    }
  }

  TEST_CASE("designs are deterministic in the seed") {
    CHECK(small_design(3.0, 8).data == small_design(3.0, 8).data);
    CHECK(small_design(3.0, 8).data != small_design(3.0, 9).data);
    CHECK(baumwelch_design(4).data == baumwelch_design(4).data);
    const auto a = large_design(3.0, 6), b = large_design(3.0, 6);
    CHECK(a.data == b.data);
    CHECK(a.design.truth == b.design.truth);
  }

  TEST_CASE("large design layout") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto sim = large_design(5.0, seed);
      CHECK(sim.data.size() == 50000);
      const auto& cps = sim.design.truth;
      CHECK(cps.segment_count() == 40);
      for (std::size_t k = 0; k < 40; ++k) CHECK(cps.segment_end(k) - cps.segment_begin(k) >= 25);
      for (std::size_t k = 0; k < 40; ++k) CHECK(sim.design.means[k] == (k % 2 ? 6.0 : 1.0));
    }
    CHECK(large_design(5.0, 1).design.truth != large_design(5.0, 2).design.truth);
  }

  TEST_CASE("baum-welch design layout") {
    const auto sim = baumwelch_design(1);
    CHECK(sim.data.size() == 1000);
    CHECK(sim.design.truth.breakpoints() ==
          std::vector<std::size_t>{100, 130, 200, 475, 500, 600, 630, 800, 975});
    CHECK(sim.design.means == std::vector<double>{1, 4.3, 1.15, 6, 4.2, 1, 4.3, 1.15, 6, 4.2});
  }

  TEST_CASE("design names") {
    CHECK(parse_design("small") == DesignKind::small);
    CHECK(parse_design("large") == DesignKind::large);
    CHECK(parse_design("bw") == DesignKind::bw);
    CHECK_THROWS_AS(parse_design("medium"), InputError);
    CHECK(make_design(DesignKind::small, 2.0, 5).data == small_design(2.0, 5).data);
  }

  TEST_CASE("negative binomial designs") {
    DesignSpec design;
    design.name = "nb";
    design.family = Family::negbin;
    design.truth = ChangePointSet(20000, {10000});
    design.means = {3.0, 8.0};
    design.dispersion = 2.0;
    design.seed = 10;
    const auto sim = simulate(design);
    double sum = 0, sq = 0;
    for (std::size_t i = 0; i < 10000; ++i) sum += sim.data[i], sq += sim.data[i] * sim.data[i];
    const double mean = sum / 1e4, var = sq / 1e4 - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.05));
    CHECK(var == doctest::Approx(3.0 + 9.0 / 2.0).epsilon(0.1));
  }

  TEST_CASE("random variates have the right moments") {
    Rng rng(1234);
    const int draws = 200000;
    double u = 0, z = 0, z2 = 0, p = 0, big = 0, g = 0;
    for (int j = 0; j < draws; ++j) {
      u += rng.uniform();
      const double n = rng.normal();
      z += n;
      z2 += n * n;
      p += double(rng.poisson(3.5));
      big += double(rng.poisson(80.0));
      g += rng.gamma(2.5, 2.0);
    }
    CHECK(u / draws == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(z / draws) < 0.01);
    CHECK(z2 / draws == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p / draws == doctest::Approx(3.5).epsilon(0.01));
    CHECK(big / draws == doctest::Approx(80.0).epsilon(0.01));
    CHECK(g / draws == doctest::Approx(5.0).epsilon(0.01));
    std::set<std::uint64_t> seen;
    for (int j = 0; j < 1000; ++j) {
      const auto v = rng.uniform_int(3, 7);
      CHECK(v >= 3);
      CHECK(v <= 7);
      seen.insert(v);
    }
    CHECK(seen.size() == 5);
  }

  TEST_CASE("the random stream is pinned") {
    Rng rng(42);
    const std::uint64_t first = rng.next();
    std::mt19937_64 reference(42);
    CHECK(first == reference());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  }

  TEST_CASE("rand index examples") {
    const ChangePointSet a(10, {3, 6});
    CHECK(rand_index(a, a) == 1.0);
    CHECK(rand_index(ChangePointSet::single_segment(4), ChangePointSet(4, {2})) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(rand_index(ChangePointSet(4, {2}), ChangePointSet(5, {2})), InputError);
  }

  TEST_CASE("rand index equals pair counting exactly") {
    Rng rng(77);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 2 + rng.uniform_int(0, 198);
      const auto a = random_segmentation(rng, n), b = random_segmentation(rng, n);
      CHECK(rand_index(a, b) == oracle::naive_rand_index(a, b));
      CHECK(rand_index(a, b) == rand_index(b, a));
      CHECK(rand_index(a, a) == 1.0);
    }
  }
}
