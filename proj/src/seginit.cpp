#include "iclseg/seginit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "iclseg/errors.hpp"

namespace iclseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two values closer than this are treated as tied.
double tie_tolerance(double value) { return 1e-10 * std::max(1.0, std::abs(value)); }

void check_kmax(std::size_t n, std::size_t kmax) {
  if (kmax < 1 || kmax > n) {
    throw InputError("kmax must lie in [1, n] (kmax=" + std::to_string(kmax) +
                     ", n=" + std::to_string(n) + ")");
  }
}

}  // namespace

std::string_view to_string(InitMethod method) {
  return method == InitMethod::dp ? "dp" : "binseg";
}

InitMethod parse_init_method(std::string_view name) {
  if (name == "dp") return InitMethod::dp;
  if (name == "binseg") return InitMethod::binseg;
  throw InputError("unknown initializer '" + std::string(name) + "'");
}

SegmentCost::SegmentCost(std::span<const double> data, const SegmentModel& model)
    : model_(model), sums_(data.size() + 1, 0.0) {
  validate_series(model.family, data);
  if (model.family == Family::normal) {
    double mean = 0.0;
    for (double x : data) mean += x;
    shift_ = mean / static_cast<double>(data.size());
    squares_.assign(data.size() + 1, 0.0);
  } else {
    base_.assign(data.size() + 1, 0.0);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data[i] - shift_;
    sums_[i + 1] = sums_[i] + x;
    if (model.family == Family::normal) {
      squares_[i + 1] = squares_[i] + x * x;
    } else {
      base_[i + 1] = base_[i] + count_log_base(model.family, data[i], model.dispersion);
    }
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  low_ = *lo - shift_;
  high_ = *hi - shift_;
  if (model.family != Family::normal) {
    low_ = std::max(low_, kRateFloor);
    high_ = std::max(high_, kRateFloor);
  }
}

bool SegmentCost::mean_only() const noexcept {
  return model_.family != Family::normal || model_.shared_variance;
}

double SegmentCost::mle(std::size_t begin, std::size_t end) const {
  const double m = (sums_[end] - sums_[begin]) / static_cast<double>(end - begin);
  return model_.family == Family::normal ? m : std::max(m, kRateFloor);
}

double SegmentCost::at(std::size_t begin, std::size_t end, double mu) const {
  const double len = static_cast<double>(end - begin);
  const double sum = sums_[end] - sums_[begin];
  switch (model_.family) {
    case Family::normal: {
      const double var = model_.variance;
      const double ss = squares_[end] - squares_[begin] - 2.0 * mu * sum + len * mu * mu;
      return 0.5 * len * std::log(2.0 * std::numbers::pi * var) + ss / (2.0 * var);
    }
    case Family::poisson:
      return len * mu - (sum > 0.0 ? sum * std::log(mu) : 0.0) - (base_[end] - base_[begin]);
    case Family::negbin: {
      const double phi = model_.dispersion;
      const double s_log = sum > 0.0 ? sum * (std::log(mu) - std::log(phi + mu)) : 0.0;
      return len * phi * std::log1p(mu / phi) - s_log - (base_[end] - base_[begin]);
    }
  }
  return kInf;
}

double SegmentCost::slope(std::size_t begin, std::size_t end, double mu) const {
  const double len = static_cast<double>(end - begin);
  const double sum = sums_[end] - sums_[begin];
  switch (model_.family) {
    case Family::normal:
      return (len * mu - sum) / model_.variance;
    case Family::poisson:
      return len - sum / mu;
    case Family::negbin: {
      const double phi = model_.dispersion;
      return phi * (len * mu - sum) / (mu * (phi + mu));
    }
  }
  return 0.0;
}

double SegmentCost::operator()(std::size_t begin, std::size_t end) const {
  const double len = static_cast<double>(end - begin);
  const double sum = sums_[end] - sums_[begin];
  switch (model_.family) {
    case Family::normal: {
      const double rss =
          end - begin == 1 ? 0.0 : std::max(0.0, squares_[end] - squares_[begin] - sum * sum / len);
      const double var =
          model_.shared_variance ? model_.variance : std::max(rss / len, kVarianceFloor);
      return 0.5 * len * std::log(2.0 * std::numbers::pi * var) + rss / (2.0 * var);
    }
    case Family::poisson: {
      const double rate = std::max(sum / len, kRateFloor);
      const double s_log = sum > 0.0 ? sum * std::log(rate) : 0.0;
      return len * rate - s_log - (base_[end] - base_[begin]);
    }
    case Family::negbin: {
      const double phi = model_.dispersion;
      const double m = std::max(sum / len, kRateFloor);
      const double s_log = sum > 0.0 ? sum * (std::log(m) - std::log(phi + m)) : 0.0;
      return len * phi * std::log1p(m / phi) - s_log - (base_[end] - base_[begin]);
    }
  }
  return kInf;
}

double segmentation_log_likelihood(std::span<const double> data, const ChangePointSet& cps,
                                   const SegmentModel& model) {
  if (cps.length() != data.size()) throw InputError("segmentation length mismatch");
  const SegmentCost cost(data, model);
  double total = 0.0;
  for (std::size_t k = 0; k < cps.segment_count(); ++k) {
    total -= cost(cps.segment_begin(k), cps.segment_end(k));
  }
  return total;
}

namespace {

using Tails = std::vector<std::vector<double>>;

// tail[k][s]: minimal cost of splitting [s, n) into k segments.
void fill_inequality(const SegmentCost& cost, Tails& tail) {
  const std::size_t n = cost.size();
  std::vector<std::size_t> candidates;
  std::vector<double> values;
  for (std::size_t k = 1; k < tail.size(); ++k) {
    const auto& prev = tail[k - 1];
    auto& cur = tail[k];
    candidates.clear();
    for (std::size_t s = n; s-- > 0;) {
      if (prev[s + 1] < kInf) candidates.push_back(s + 1);
      if (n - s < k) continue;

      values.resize(candidates.size());
      double best = kInf;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const std::size_t t = candidates[c];
        values[c] = cost(s, t) + prev[t];
        best = std::min(best, values[c]);
      }
      cur[s] = best;

      // A candidate t that loses to "no change at s" now loses for every
      // earlier start as well, because cost(s', t) >= cost(s', s) + cost(s, t).
      if (prev[s] < kInf) {
        const double bound = prev[s] + tie_tolerance(prev[s]);
        std::size_t kept = 0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          if (values[c] <= bound) candidates[kept++] = candidates[c];
        }
        candidates.resize(kept);
      }
    }
  }
}

// Boundary of {f <= 0} between `in` (f(in) <= 0) and `out` (f(out) > 0) for
// f monotone in between; the returned point always satisfies f <= 0.
template <class F, class D>
double boundary(F f, D df, double in, double out) {
  double x = 0.5 * (in + out);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    (fx <= 0.0 ? in : out) = x;
    if (std::abs(out - in) <= 1e-13 * std::max(1.0, std::abs(x))) break;
    const double d = df(x);
    double next = d != 0.0 ? x - fx / d : in;
    if (!(next > std::min(in, out) && next < std::max(in, out))) next = 0.5 * (in + out);
    x = next;
  }
  return in;
}

// Each surviving candidate owns the set of means at which its cost curve is
// the lowest. Extending every segment by one observation adds the same
// function of the mean to every curve, so those sets only shrink when a new
// candidate arrives; a candidate whose set empties is gone for good.
void fill_functional(const SegmentCost& cost, Tails& tail) {
  const std::size_t n = cost.size();
  struct Piece {
    double lo, hi;
    std::size_t t;
  };
  std::vector<Piece> pieces, next;
  std::vector<std::size_t> seen(n + 1, n + 1);
  auto push = [&](double lo, double hi, std::size_t t) {
    if (!next.empty() && next.back().t == t) {
      next.back().hi = hi;
    } else {
      next.push_back({lo, hi, t});
    }
  };

  for (std::size_t k = 1; k < tail.size(); ++k) {
    const auto& prev = tail[k - 1];
    auto& cur = tail[k];
    pieces.clear();
    std::fill(seen.begin(), seen.end(), n + 1);
    for (std::size_t s = n; s-- > 0;) {
      const std::size_t c = s + 1;
      if (prev[c] < kInf) {
        if (pieces.empty()) {
          pieces.push_back({cost.mean_low(), cost.mean_high(), c});
        } else {
          // Before x[s] joins, the newcomer's curve is flat at prev[c]; each
          // older candidate keeps only the means where it is not above that.
          const double level = prev[c] + tie_tolerance(prev[c]);
          next.clear();
          for (const Piece& p : pieces) {
            const std::size_t t = p.t;
            auto excess = [&](double mu) { return prev[t] + cost.at(c, t, mu) - level; };
            auto slope = [&](double mu) { return cost.slope(c, t, mu); };
            const double m = std::clamp(cost.mle(c, t), p.lo, p.hi);
            if (excess(m) > 0.0) {
              push(p.lo, p.hi, c);
              continue;
            }
            const double a = excess(p.lo) > 0.0 ? boundary(excess, slope, m, p.lo) : p.lo;
            const double b = excess(p.hi) > 0.0 ? boundary(excess, slope, m, p.hi) : p.hi;
            if (a > p.lo) push(p.lo, a, c);
            push(a, b, t);
            if (b < p.hi) push(b, p.hi, c);
          }
          pieces.swap(next);
        }
      }
      if (n - s < k) continue;

      double best = kInf;
      for (const Piece& p : pieces) {
        if (seen[p.t] == s) continue;
        seen[p.t] = s;
        best = std::min(best, cost(s, p.t) + prev[p.t]);
      }
      cur[s] = best;
    }
  }
}

}  // namespace

SegPath dp_segment(std::span<const double> data, const SegmentModel& model, std::size_t kmax,
                   Pruning pruning) {
  const std::size_t n = data.size();
  check_kmax(n, kmax);
  const SegmentCost cost(data, model);
  if (pruning == Pruning::automatic) {
    pruning = cost.mean_only() ? Pruning::functional : Pruning::inequality;
  }
  if (pruning == Pruning::functional && !cost.mean_only()) {
    throw InputError("functional pruning needs a cost with the mean as its only parameter");
  }

  Tails tail(kmax + 1, std::vector<double>(n + 1, kInf));
  tail[0][n] = 0.0;
  if (pruning == Pruning::functional) {
    fill_functional(cost, tail);
  } else {
    fill_inequality(cost, tail);
  }

  SegPath path;
  path.model = model;
  path.entries.reserve(kmax);
  for (std::size_t segments = 1; segments <= kmax; ++segments) {
    std::vector<std::size_t> breakpoints;
    std::size_t s = 0;
    for (std::size_t left = segments; left > 1; --left) {
      const double target = tail[left][s] + tie_tolerance(tail[left][s]);
      for (std::size_t t = s + 1; t + left - 1 <= n; ++t) {
        if (tail[left - 1][t] < kInf && cost(s, t) + tail[left - 1][t] <= target) {
          breakpoints.push_back(t);
          s = t;
          break;
        }
      }
    }
    path.entries.push_back({ChangePointSet(n, std::move(breakpoints)), -tail[segments][0]});
  }
  return path;
}

SegPath binary_segmentation(std::span<const double> data, const SegmentModel& model,
                            std::size_t kmax) {
  const std::size_t n = data.size();
  check_kmax(n, kmax);
  const SegmentCost cost(data, model);

  struct Piece {
    std::size_t begin, end;
    std::size_t split = 0;  // 0 when the piece cannot be split
    double gain = -kInf;
  };
  auto best_split = [&](Piece& p) {
    const double whole = cost(p.begin, p.end);
    p.split = 0;
    p.gain = -kInf;
    for (std::size_t t = p.begin + 1; t < p.end; ++t) {
      p.gain = std::max(p.gain, whole - cost(p.begin, t) - cost(t, p.end));
    }
    const double bound = p.gain - tie_tolerance(p.gain);
    for (std::size_t t = p.begin + 1; t < p.end; ++t) {
      if (whole - cost(p.begin, t) - cost(t, p.end) >= bound) {
        p.split = t;
        break;
      }
    }
  };

  std::vector<Piece> pieces{{0, n}};
  best_split(pieces.front());
  double total = -cost(0, n);

  SegPath path;
  path.model = model;
  path.entries.push_back({ChangePointSet::single_segment(n), total});
  std::vector<std::size_t> breakpoints;
  while (path.entries.size() < kmax) {
    double top = -kInf;
    for (const Piece& p : pieces) top = std::max(top, p.gain);
    // pieces are ordered left to right, so the first within tolerance is leftmost
    const double bound = top - tie_tolerance(top);
    auto chosen = std::find_if(pieces.begin(), pieces.end(),
                               [&](const Piece& p) { return p.split != 0 && p.gain >= bound; });
    Piece left{chosen->begin, chosen->split};
    Piece right{chosen->split, chosen->end};
    total += chosen->gain;
    breakpoints.insert(std::upper_bound(breakpoints.begin(), breakpoints.end(), chosen->split),
                       chosen->split);
    best_split(left);
    best_split(right);
    *chosen = left;
    pieces.insert(chosen + 1, right);
    ChangePointSet cps(n, breakpoints);
    path.entries.push_back({cps, segmentation_log_likelihood(data, cps, model)});
  }
  return path;
}

SegPath initial_segmentations(std::span<const double> data, Family family, std::size_t kmax,
                              InitMethod method, bool shared_variance) {
  validate_series(family, data);
  check_kmax(data.size(), kmax);
  auto run = [&](const SegmentModel& m) {
    return method == InitMethod::dp ? dp_segment(data, m, kmax)
                                    : binary_segmentation(data, m, kmax);
  };

  SegmentModel model;
  model.family = family;
  model.shared_variance = shared_variance;
  switch (family) {
    case Family::poisson:
      return run(model);
    case Family::normal: {
      if (!shared_variance) return run(model);
      // The shared variance only rescales the least-squares objective, so the
      // pilot segmentation is final; re-evaluate the likelihoods afterwards.
      SegPath path = run(model);
      model.variance = fit_global_variance(data, path.entries.back().changepoints);
      path.model = model;
      for (auto& e : path.entries) {
        e.log_likelihood = segmentation_log_likelihood(data, e.changepoints, model);
      }
      return path;
    }
    case Family::negbin: {
      SegmentModel pilot;
      pilot.family = Family::poisson;
      const SegPath poisson = run(pilot);
      model.dispersion = fit_global_dispersion(data, poisson.entries.back().changepoints);
      return run(model);
    }
  }
  return run(model);
}

EmissionSpec params_from_changepoints(std::span<const double> data, const ChangePointSet& cps,
                                      const SegmentModel& model) {
  if (cps.length() != data.size()) throw InputError("segmentation length mismatch");
  validate_series(model.family, data);
  EmissionSpec spec;
  spec.family = model.family;
  spec.shared_variance = model.shared_variance;
  spec.dispersion = model.dispersion;
  for (std::size_t k = 0; k < cps.segment_count(); ++k) {
    const auto slice =
        data.subspan(cps.segment_begin(k), cps.segment_end(k) - cps.segment_begin(k));
    const SegmentFit fit = mle_fit(model.family, slice);
    spec.means.push_back(fit.mean);
    if (model.family == Family::normal) {
      spec.variances.push_back(model.shared_variance ? std::max(model.variance, kVarianceFloor)
                                                     : fit.variance);
    }
  }
  return spec;
}

EmissionSpec params_from_changepoints(std::span<const double> data, const ChangePointSet& cps,
                                      Family family) {
  if (cps.length() != data.size()) throw InputError("segmentation length mismatch");
  SegmentModel model;
  model.family = family;
  if (family == Family::normal) model.variance = fit_global_variance(data, cps);
  if (family == Family::negbin) model.dispersion = fit_global_dispersion(data, cps);
  return params_from_changepoints(data, cps, model);
}

}  // namespace iclseg
