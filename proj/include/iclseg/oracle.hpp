#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iclseg/changepoints.hpp"
#include "iclseg/chmm.hpp"
#include "iclseg/emission.hpp"
#include "iclseg/seginit.hpp"

namespace iclseg::oracle {

// Largest series the enumerators accept.
inline constexpr std::size_t kMaxLength = 20;

// All C(n-1, K-1) segmentations, breakpoint vectors in lexicographic order.
// Throws InputError for n > kMaxLength or K outside [1, n].
std::vector<ChangePointSet> enumerate_segmentations(std::size_t n, std::size_t segments);

// Exact posterior over M_K with the uniform prior 1/C(n-1, K-1), computed
// segmentation by segmentation in extended precision.
struct EnumeratedPosterior {
  std::vector<ChangePointSet> segmentations;
  std::vector<double> probabilities;
  double log_normalizer = 0.0;  // log sum_S P(X|S) / C(n-1, K-1)
  double entropy = 0.0;
  double log_joint = 0.0;       // log_normalizer - log C(n-1, K-1) + log P(K)
  ChangePointSet map;           // earliest among maximizers
  Table marginal;               // P(S_i = k | X)
  Table stay;                   // P(S_i = k | S_{i-1} = k, X); zero when unreachable
  Table advance;                // P(S_i = k+1 | S_{i-1} = k, X)
};

EnumeratedPosterior brute_posterior(std::span<const double> data, const EmissionSpec& spec,
                                    double log_prior_k = 0.0);

// Exhaustive maximizer of the total segment log-likelihood at per-segment
// MLEs (shared parameters from `model`); lexicographically smallest on ties.
ChangePointSet brute_optimal_segmentation(std::span<const double> data, const SegmentModel& model,
                                          std::size_t segments);

// Unrestricted pair-counting Rand index, O(n^2).
double naive_rand_index(const ChangePointSet& a, const ChangePointSet& b);

}  // namespace iclseg::oracle

namespace iclseg::oracle {

// A small random problem: data, emission parameters and the matching
// segment model (shared parameters) for the exact initializer check.
struct RandomInstance {
  std::vector<double> data;
  EmissionSpec emission;
  SegmentModel model;
};

// n in [min_n, max_n], K in [1, min(max_k, n)], family drawn from all three.
// Half the instances use parameters fitted on a random segmentation, half use
// unrelated random parameters.
RandomInstance random_instance(std::uint64_t seed, std::size_t min_n = 4, std::size_t max_n = 12,
                               std::size_t max_k = 4);

// Largest deviations between the forward-backward quantities and enumeration
// over a batch of random instances.
struct EquivalenceReport {
  std::size_t instances = 0;
  double marginal = 0.0;
  double transition = 0.0;
  double entropy = 0.0;
  double log_joint = 0.0;
  std::size_t map_mismatches = 0;
  std::size_t dp_mismatches = 0;

  double max_deviation() const;
  bool passed(double tolerance) const {
    return max_deviation() < tolerance && map_mismatches == 0 && dp_mismatches == 0;
  }
};

EquivalenceReport check_equivalence(std::size_t instances, std::uint64_t seed);

}  // namespace iclseg::oracle
