#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "iclseg/changepoints.hpp"
#include "iclseg/emission.hpp"

namespace iclseg {

// Family plus the nuisance parameters every segment shares. Segment costs are
// evaluated with these held fixed and the per-segment mean at its MLE.
struct SegmentModel {
  Family family = Family::poisson;
  bool shared_variance = true;         // normal only
  double variance = 1.0;               // normal with shared_variance
  double dispersion = kDispersionMax;  // negbin
};

// Negative log-likelihood of a contiguous slice at its floored MLE, in O(1)
// after O(n) prefix sums.
class SegmentCost {
 public:
  SegmentCost(std::span<const double> data, const SegmentModel& model);

  // Cost of the zero-based half-open range [begin, end), begin < end.
  double operator()(std::size_t begin, std::size_t end) const;

  std::size_t size() const noexcept { return sums_.size() - 1; }

  // True when the cost depends on a single free parameter, the segment mean.
  bool mean_only() const noexcept;
  // Floored segment MLE of the mean, and the cost with the mean held at `mu`.
  // Normal means are on the centred scale used internally.
  double mle(std::size_t begin, std::size_t end) const;
  double at(std::size_t begin, std::size_t end, double mu) const;
  double slope(std::size_t begin, std::size_t end, double mu) const;
  // Every floored segment MLE lies in [mean_low(), mean_high()].
  double mean_low() const noexcept { return low_; }
  double mean_high() const noexcept { return high_; }

 private:
  SegmentModel model_;
  double shift_ = 0.0;
  double low_ = 0.0, high_ = 0.0;
  std::vector<double> sums_;
  std::vector<double> squares_;
  std::vector<double> base_;  // per-observation terms that do not depend on the mean
};

double segmentation_log_likelihood(std::span<const double> data, const ChangePointSet& cps,
                                   const SegmentModel& model);

struct SegPathEntry {
  ChangePointSet changepoints;
  double log_likelihood = 0.0;
};

// Best (or greedy) segmentations for K = 1..kmax under one SegmentModel.
struct SegPath {
  SegmentModel model;
  std::vector<SegPathEntry> entries;  // entries[K - 1]

  std::size_t max_segments() const noexcept { return entries.size(); }
  const SegPathEntry& at(std::size_t segments) const { return entries.at(segments - 1); }
};

enum class InitMethod { dp, binseg };

std::string_view to_string(InitMethod method);
InitMethod parse_init_method(std::string_view name);

enum class Pruning {
  automatic,   // functional when the cost has one free parameter, else inequality
  inequality,  // drop a candidate once it loses to the (k-1)-segment optimum
  functional,  // track, per candidate, the set of means where it is still optimal
};

// Exact segment-neighbourhood dynamic programming. For every K the returned
// segmentation maximizes the total segment log-likelihood; among optima the
// lexicographically smallest breakpoint vector wins. Pruning only discards
// candidates that can never again be optimal, so every mode gives the same
// answer. Throws InputError unless 1 <= kmax <= n, or when functional pruning
// is requested for per-segment normal variances.
SegPath dp_segment(std::span<const double> data, const SegmentModel& model, std::size_t kmax,
                   Pruning pruning = Pruning::automatic);

// Greedy binary segmentation: each step inserts the single split with the
// largest log-likelihood gain, leftmost on ties. Outputs are nested in K.
SegPath binary_segmentation(std::span<const double> data, const SegmentModel& model,
                            std::size_t kmax);

// Runs an initializer for a bare family, fitting the shared nuisance parameter
// first: the normal variance and negative binomial dispersion come from the
// kmax-segment fit (the dispersion from a Poisson pilot run).
SegPath initial_segmentations(std::span<const double> data, Family family, std::size_t kmax,
                              InitMethod method, bool shared_variance = true);

inline SegPath dp_segment(std::span<const double> data, Family family, std::size_t kmax) {
  return initial_segmentations(data, family, kmax, InitMethod::dp);
}
inline SegPath binary_segmentation(std::span<const double> data, Family family,
                                   std::size_t kmax) {
  return initial_segmentations(data, family, kmax, InitMethod::binseg);
}

// Per-segment MLE for the given breakpoints, shared parameters taken from `model`.
EmissionSpec params_from_changepoints(std::span<const double> data, const ChangePointSet& cps,
                                      const SegmentModel& model);

// Same, with the shared variance or dispersion fitted on `cps` itself.
EmissionSpec params_from_changepoints(std::span<const double> data, const ChangePointSet& cps,
                                      Family family);

}  // namespace iclseg
