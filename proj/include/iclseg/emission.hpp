#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iclseg/changepoints.hpp"

namespace iclseg {

enum class Family { normal, poisson, negbin };

std::string_view to_string(Family family);
// Accepts "normal", "poisson", "negbin"; throws InputError otherwise.
Family parse_family(std::string_view name);

inline constexpr double kRateFloor = 1e-6;
inline constexpr double kVarianceFloor = 1e-8;
// Dispersion returned when the data shows no overdispersion. Large enough that
// the negative binomial is numerically a Poisson.
inline constexpr double kDispersionMax = 1e8;

inline bool is_count_family(Family f) { return f != Family::normal; }

// Throws InputError when the series is empty, contains non-finite values, or
// (count families) holds negative or non-integral values.
void validate_series(Family family, std::span<const double> data);

// Emission law for a K-segment model. `means[k]` is the normal mean, Poisson
// rate or negative binomial mean of segment k; `variances[k]` is only used by
// the normal family. The negative binomial has variance m + m^2/dispersion.
struct EmissionSpec {
  Family family = Family::poisson;
  std::vector<double> means;
  std::vector<double> variances;
  double dispersion = kDispersionMax;
  bool shared_variance = true;

  std::size_t segment_count() const noexcept { return means.size(); }

  // Throws InputError when a parameter violates its floor or the per-segment
  // vectors disagree in length.
  void validate() const;

  // log g_{theta_k}(x) for zero-based segment k. Throws InputError for x
  // outside the family's support.
  double log_pdf(std::size_t k, double x) const;
};

// Maximum-likelihood parameters of one segment (floored).
struct SegmentFit {
  double mean = 0.0;
  double variance = 0.0;  // normal only
};

// Throws InputError on an empty slice.
SegmentFit mle_fit(Family family, std::span<const double> slice);

// Pooled method-of-moments dispersion over the segments of `cps`; returns
// kDispersionMax when the pooled variance does not exceed the pooled mean.
double fit_global_dispersion(std::span<const double> data, const ChangePointSet& cps);

// Pooled residual variance over the segments of `cps` (maximum likelihood,
// floored at kVarianceFloor).
double fit_global_variance(std::span<const double> data, const ChangePointSet& cps);

// Mean-independent part of a count log-pmf: -log x! for the Poisson,
// log Gamma(x + phi) - log Gamma(phi) - log x! for the negative binomial.
double count_log_base(Family family, double x, double dispersion);

// Log-likelihood of a slice under a single-segment law.
double slice_log_likelihood(const EmissionSpec& spec, std::size_t k, std::span<const double> slice);

}  // namespace iclseg
