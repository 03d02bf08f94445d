#include "iclseg/emission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iclseg/errors.hpp"

namespace iclseg {

namespace {

// log Gamma(x + phi) - log Gamma(phi) for integral x >= 0. The direct sum keeps
// full precision when phi is huge and lgamma values cancel badly.
double log_rising(double x, double phi) {
  if (x <= 2000.0) {
    double acc = 0.0;
    for (double j = 0.0; j < x; j += 1.0) acc += std::log(phi + j);
    return acc;
  }
  return std::lgamma(x + phi) - std::lgamma(phi);
}

void check_count(double x) {
  if (!(x >= 0.0) || std::floor(x) != x || !std::isfinite(x)) {
    throw InputError("count observation " + std::to_string(x) +
                     " is not a non-negative integer");
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::normal: return "normal";
    case Family::poisson: return "poisson";
    case Family::negbin: return "negbin";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "normal") return Family::normal;
  if (name == "poisson") return Family::poisson;
  if (name == "negbin") return Family::negbin;
  throw InputError("unknown family '" + std::string(name) + "'");
}

void validate_series(Family family, std::span<const double> data) {
  if (data.empty()) throw InputError("data series is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data[i];
    if (!std::isfinite(x)) {
      throw InputError("non-finite observation at index " + std::to_string(i + 1));
    }
    if (is_count_family(family) && (x < 0.0 || std::floor(x) != x)) {
      throw InputError("observation " + std::to_string(i + 1) +
                       " is not a non-negative integer count");
    }
  }
}

void EmissionSpec::validate() const {
  if (means.empty()) throw InputError("emission spec has no segments");
  switch (family) {
    case Family::normal:
      if (variances.size() != means.size()) {
        throw InputError("normal emission needs one variance per segment");
      }
      for (double v : variances) {
        if (!(v >= kVarianceFloor)) throw InputError("variance below floor");
      }
      for (double m : means) {
        if (!std::isfinite(m)) throw InputError("non-finite normal mean");
      }
      break;
    case Family::negbin:
      if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw InputError("dispersion must be positive and finite");
      }
      [[fallthrough]];
    case Family::poisson:
      for (double m : means) {
        if (!(m >= kRateFloor) || !std::isfinite(m)) throw InputError("rate below floor");
      }
      break;
  }
}

double EmissionSpec::log_pdf(std::size_t k, double x) const {
  const double m = means.at(k);
  switch (family) {
    case Family::normal: {
      if (!std::isfinite(x)) throw InputError("non-finite observation");
      const double v = variances.at(k);
      const double d = x - m;
      return -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    case Family::poisson:
      check_count(x);
      return x * std::log(m) - m - std::lgamma(x + 1.0);
    case Family::negbin: {
      check_count(x);
      const double phi = dispersion;
      return log_rising(x, phi) - std::lgamma(x + 1.0) - phi * std::log1p(m / phi) +
             x * (std::log(m) - std::log(phi + m));
    }
  }
  return 0.0;
}

double count_log_base(Family family, double x, double dispersion) {
  const double base = -std::lgamma(x + 1.0);
  return family == Family::negbin ? base + log_rising(x, dispersion) : base;
}

SegmentFit mle_fit(Family family, std::span<const double> slice) {
  if (slice.empty()) throw InputError("maximum-likelihood fit of an empty slice");
  const double len = static_cast<double>(slice.size());
  double sum = 0.0;
  for (double x : slice) sum += x;
  const double mean = sum / len;
  SegmentFit fit;
  if (family == Family::normal) {
    double ss = 0.0;
    for (double x : slice) ss += (x - mean) * (x - mean);
    fit.mean = mean;
    fit.variance = std::max(ss / len, kVarianceFloor);
  } else {
    fit.mean = std::max(mean, kRateFloor);
  }
  return fit;
}

double fit_global_dispersion(std::span<const double> data, const ChangePointSet& cps) {
  if (cps.length() != data.size()) throw InputError("segmentation length mismatch");
  // Per segment, E[unbiased variance] = m + m^2/phi; pool with weights (L_k - 1).
  double excess = 0.0;  // sum_k (L_k - 1)(s_k^2 - m_k)
  double squares = 0.0; // sum_k (L_k - 1) m_k^2
  for (std::size_t k = 0; k < cps.segment_count(); ++k) {
    const auto slice = data.subspan(cps.segment_begin(k), cps.segment_end(k) - cps.segment_begin(k));
    if (slice.size() < 2) continue;
    double sum = 0.0;
    for (double x : slice) sum += x;
    const double mean = sum / static_cast<double>(slice.size());
    double ss = 0.0;
    for (double x : slice) ss += (x - mean) * (x - mean);
    const double dof = static_cast<double>(slice.size() - 1);
    excess += ss - dof * mean;
    squares += dof * mean * mean;
  }
  if (excess <= 0.0 || squares <= 0.0) return kDispersionMax;
  return std::min(squares / excess, kDispersionMax);
}

double fit_global_variance(std::span<const double> data, const ChangePointSet& cps) {
  if (cps.length() != data.size()) throw InputError("segmentation length mismatch");
  double rss = 0.0;
  for (std::size_t k = 0; k < cps.segment_count(); ++k) {
    const auto slice = data.subspan(cps.segment_begin(k), cps.segment_end(k) - cps.segment_begin(k));
    double sum = 0.0;
    for (double x : slice) sum += x;
    const double mean = sum / static_cast<double>(slice.size());
    for (double x : slice) rss += (x - mean) * (x - mean);
  }
  return std::max(rss / static_cast<double>(data.size()), kVarianceFloor);
}

double slice_log_likelihood(const EmissionSpec& spec, std::size_t k, std::span<const double> slice) {
  double acc = 0.0;
  for (double x : slice) acc += spec.log_pdf(k, x);
  return acc;
}

}  // namespace iclseg
