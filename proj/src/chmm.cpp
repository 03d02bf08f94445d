#include "iclseg/chmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iclseg/errors.hpp"

namespace iclseg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double tie_tolerance(double value) { return 1e-10 * std::max(1.0, std::abs(value)); }

double normalize_row(std::span<double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  if (sum > 0.0 && std::isfinite(sum)) {
    for (double& v : row) v /= sum;
  }
  return sum;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

void check_column(std::span<const double> col, const char* what, std::size_t segments,
                  std::size_t position) {
  for (double v : col) {
    if (std::isnan(v)) throw NumericalError(std::string(what) + " produced NaN", segments, position);
  }
  if (*std::max_element(col.begin(), col.end()) == kNegInf) {
    throw NumericalError(std::string(what) + " column has no mass", segments, position);
  }
}

// Shared recursions; `logg(i, k)` is log g_k(x_i).
template <class LogEmission>
LogPass run_forward(std::size_t n, std::size_t segments, double eta, LogEmission logg) {
  const double stay = std::log1p(-eta);
  const double move = std::log(eta);
  LogPass pass{Table(n, segments, kNegInf)};
  pass.log_values(0, 0) = logg(0, 0);
  check_column(pass.log_values.row(0), "forward recursion", segments, 1);
  for (std::size_t i = 1; i < n; ++i) {
    const auto prev = pass.log_values.row(i - 1);
    auto cur = pass.log_values.row(i);
    const std::size_t top = std::min(i + 1, segments);
    for (std::size_t k = 0; k < top; ++k) {
      double mass = prev[k] + stay;
      if (k > 0) mass = log_add(mass, prev[k - 1] + move);
      cur[k] = mass + logg(i, k);
    }
    check_column(cur, "forward recursion", segments, i + 1);
  }
  return pass;
}

template <class LogEmission>
LogPass run_backward(std::size_t n, std::size_t segments, double eta, LogEmission logg) {
  const double stay = std::log1p(-eta);
  const double move = std::log(eta);
  LogPass pass{Table(n, segments, kNegInf)};
  pass.log_values(n - 1, segments - 1) = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const auto next = pass.log_values.row(i + 1);
    auto cur = pass.log_values.row(i);
    // S_i = k needs K - k more segments in the n - i remaining positions
    const std::size_t lowest = segments > n - 1 - i ? segments - 1 - (n - 1 - i) : 0;
    for (std::size_t k = lowest; k < segments; ++k) {
      double mass = stay + logg(i + 1, k) + next[k];
      if (k + 1 < segments) mass = log_add(mass, move + logg(i + 1, k + 1) + next[k + 1]);
      cur[k] = mass;
    }
    check_column(cur, "backward recursion", segments, i + 1);
  }
  return pass;
}

}  // namespace

void ChmmSpec::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie strictly between 0 and 1");
  if (segments < 1 || segments > n) {
    throw InputError("segment count " + std::to_string(segments) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  emission.validate();
  if (emission.segment_count() != segments) {
    throw InputError("emission has " + std::to_string(emission.segment_count()) +
                     " segments, chain has " + std::to_string(segments));
  }
}

double default_eta(std::size_t n, std::size_t segments) {
  if (segments <= 1 || segments >= n) return 0.5;
  return static_cast<double>(segments - 1) / static_cast<double>(n - 1);
}

ChmmSpec make_chmm_spec(EmissionSpec emission, std::size_t n, std::optional<double> eta,
                        double log_prior_k) {
  ChmmSpec spec;
  spec.n = n;
  spec.segments = emission.segment_count();
  spec.eta = eta.value_or(default_eta(n, spec.segments));
  spec.emission = std::move(emission);
  spec.log_prior_k = log_prior_k;
  spec.validate();
  return spec;
}

Table log_emission_table(const EmissionSpec& emission, std::span<const double> data) {
  const std::size_t n = data.size();
  const std::size_t segments = emission.segment_count();
  validate_series(emission.family, data);
  Table out(n, segments);
  if (emission.family == Family::normal) {
    for (std::size_t k = 0; k < segments; ++k) {
      const double mean = emission.means[k];
      const double var = emission.variances[k];
      const double norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = data[i] - mean;
        out(i, k) = norm - d * d / (2.0 * var);
      }
    }
    return out;
  }
  // count families: log g_k(x) = base(x) + slope_k * x + intercept_k
  std::vector<double> slope(segments);
  std::vector<double> intercept(segments);
  const double phi = emission.dispersion;
  for (std::size_t k = 0; k < segments; ++k) {
    const double m = emission.means[k];
    if (emission.family == Family::poisson) {
      slope[k] = std::log(m);
      intercept[k] = -m;
    } else {
      slope[k] = std::log(m) - std::log(phi + m);
      intercept[k] = -phi * std::log1p(m / phi);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = data[i];
    const double base = count_log_base(emission.family, x, phi);
    auto row = out.row(i);
    for (std::size_t k = 0; k < segments; ++k) {
      row[k] = base + intercept[k] + (x > 0.0 ? slope[k] * x : 0.0);
    }
  }
  return out;
}

namespace {

void check_spec(const ChmmSpec& spec, std::span<const double> data) {
  spec.validate();
  if (data.size() != spec.n) {
    throw InputError("chain length " + std::to_string(spec.n) + " does not match data length " +
                     std::to_string(data.size()));
  }
}

}  // namespace

LogPass forward(const ChmmSpec& spec, std::span<const double> data) {
  check_spec(spec, data);
  const Table logg = log_emission_table(spec.emission, data);
  return run_forward(spec.n, spec.segments, spec.eta,
                     [&](std::size_t i, std::size_t k) { return logg(i, k); });
}

LogPass backward(const ChmmSpec& spec, std::span<const double> data) {
  check_spec(spec, data);
  const Table logg = log_emission_table(spec.emission, data);
  return run_backward(spec.n, spec.segments, spec.eta,
                      [&](std::size_t i, std::size_t k) { return logg(i, k); });
}

double log_prior_mass(const ChmmSpec& spec) {
  if (!(spec.eta > 0.0 && spec.eta < 1.0) || spec.segments < 1 || spec.segments > spec.n) {
    throw InputError("invalid chain for prior mass");
  }
  const auto one = [](std::size_t, std::size_t) { return 0.0; };
  // F0_1(1) = 1, so the product is B0_1(1)
  return run_backward(spec.n, spec.segments, spec.eta, one).log_value(0, 0);
}

FBState forward_backward(const ChmmSpec& spec, std::span<const double> data) {
  check_spec(spec, data);
  FBState fb;
  fb.segments = spec.segments;
  fb.eta = spec.eta;
  fb.log_emission = log_emission_table(spec.emission, data);
  const auto logg = [&](std::size_t i, std::size_t k) { return fb.log_emission(i, k); };
  fb.forward = run_forward(spec.n, spec.segments, spec.eta, logg);
  fb.backward = run_backward(spec.n, spec.segments, spec.eta, logg);
  fb.log_likelihood = fb.forward.log_value(0, 0) + fb.backward.log_value(0, 0);
  if (!std::isfinite(fb.log_likelihood)) {
    throw NumericalError("total likelihood is not finite", spec.segments, 1);
  }
  fb.log_prior_mass = log_prior_mass(spec);
  return fb;
}

Posteriors posteriors(const FBState& fb) {
  const std::size_t n = fb.length();
  const std::size_t segments = fb.segments;
  const double stay_log = std::log1p(-fb.eta);
  const double move_log = std::log(fb.eta);
  Posteriors post{Table(n, segments), Table(n, segments), Table(n, segments)};
  for (std::size_t i = 0; i < n; ++i) {
    auto mu = post.marginal.row(i);
    double top = kNegInf;
    for (std::size_t k = 0; k < segments; ++k) {
      mu[k] = fb.forward.log_value(i, k) + fb.backward.log_value(i, k);
      top = std::max(top, mu[k]);
    }
    if (top == kNegInf) throw NumericalError("posterior marginal has no mass", segments, i + 1);
    for (double& v : mu) v = std::exp(v - top);
    normalize_row(mu);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t k = 0; k < segments; ++k) {
      if (post.marginal(i - 1, k) == 0.0) continue;
      // B_{i-1}(k) is the log-sum of the two outgoing terms
      const double stay = stay_log + fb.log_emission(i, k) + fb.backward.log_value(i, k);
      const double advance = k + 1 < segments ? move_log + fb.log_emission(i, k + 1) +
                                                    fb.backward.log_value(i, k + 1)
                                              : kNegInf;
      const double total = log_add(stay, advance);
      if (total == kNegInf) continue;
      post.stay(i, k) = std::exp(stay - total);
      post.advance(i, k) = std::exp(advance - total);
    }
  }
  return post;
}

double log_joint(const ChmmSpec& spec, const FBState& fb) {
  const double n = static_cast<double>(spec.n);
  const double k = static_cast<double>(spec.segments);
  const double log_choose = std::lgamma(n) - std::lgamma(k) - std::lgamma(n - k + 1.0);
  return spec.log_prior_k - log_choose + fb.log_likelihood - fb.log_prior_mass;
}

ChangePointSet viterbi(const ChmmSpec& spec, std::span<const double> data) {
  check_spec(spec, data);
  const std::size_t n = spec.n;
  const std::size_t segments = spec.segments;
  const Table logg = log_emission_table(spec.emission, data);

  // Every path in M_K carries the same chain mass eta^(K-1) (1-eta)^(n-K), so
  // transitions drop out of the argmax. best(i, k): best log-density of
  // x_{i+1..n} given S_i = k and S_n = K.
  Table best(n, segments, kNegInf);
  best(n - 1, segments - 1) = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t k = 0; k < segments; ++k) {
      double v = logg(i + 1, k) + best(i + 1, k);
      if (k + 1 < segments) v = std::max(v, logg(i + 1, k + 1) + best(i + 1, k + 1));
      best(i, k) = v;
    }
  }

  std::vector<std::size_t> breakpoints;
  std::size_t k = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (k + 1 >= segments) break;
    const double advance = logg(i + 1, k + 1) + best(i + 1, k + 1);
    if (advance > kNegInf && advance >= best(i, k) - tie_tolerance(best(i, k))) {
      breakpoints.push_back(i + 1);
      ++k;
    }
  }
  return ChangePointSet(n, std::move(breakpoints));
}

}  // namespace iclseg
