#include "iclseg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "iclseg/errors.hpp"

namespace iclseg::oracle {

namespace {

void check_size(std::size_t n, std::size_t segments) {
  if (n > kMaxLength) {
    throw InputError("enumeration refused for n=" + std::to_string(n) + " (limit " +
                     std::to_string(kMaxLength) + ")");
  }
  if (segments < 1 || segments > n) throw InputError("segment count outside [1, n]");
}

long double log_sum_exp(const std::vector<long double>& v) {
  const long double top = *std::max_element(v.begin(), v.end());
  // Neumaier summation of the shifted exponentials
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (long double x : v) {
    const long double term = std::exp(x - top);
    const long double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return top + std::log(sum + comp);
}

long double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<long double>(n + 1)) -
         std::lgamma(static_cast<long double>(k + 1)) -
         std::lgamma(static_cast<long double>(n - k + 1));
}

}  // namespace

std::vector<ChangePointSet> enumerate_segmentations(std::size_t n, std::size_t segments) {
  check_size(n, segments);
  std::vector<ChangePointSet> out;
  std::vector<std::size_t> combo(segments - 1);
  for (std::size_t j = 0; j < combo.size(); ++j) combo[j] = j + 1;
  while (true) {
    out.emplace_back(n, combo);
    // advance to the next combination of {1..n-1} in lexicographic order
    std::size_t j = combo.size();
    while (j > 0 && combo[j - 1] == n - 1 - (combo.size() - j)) --j;
    if (j == 0) break;
    ++combo[j - 1];
    for (std::size_t r = j; r < combo.size(); ++r) combo[r] = combo[r - 1] + 1;
  }
  return out;
}

EnumeratedPosterior brute_posterior(std::span<const double> data, const EmissionSpec& spec,
                                    double log_prior_k) {
  const std::size_t n = data.size();
  const std::size_t segments = spec.segment_count();
  check_size(n, segments);
  spec.validate();

  EnumeratedPosterior out;
  out.segmentations = enumerate_segmentations(n, segments);
  std::vector<long double> loglik;
  loglik.reserve(out.segmentations.size());
  for (const auto& cps : out.segmentations) {
    long double acc = 0.0L;
    const auto labels = cps.labels();
    for (std::size_t i = 0; i < n; ++i) acc += spec.log_pdf(labels[i], data[i]);
    loglik.push_back(acc);
  }
  const long double lse = log_sum_exp(loglik);

  long double h = 0.0L;
  out.probabilities.reserve(loglik.size());
  std::vector<long double> prob(loglik.size());
  for (std::size_t s = 0; s < loglik.size(); ++s) {
    prob[s] = std::exp(loglik[s] - lse);
    if (prob[s] > 0.0L) h -= prob[s] * (loglik[s] - lse);
    out.probabilities.push_back(static_cast<double>(prob[s]));
  }
  out.entropy = static_cast<double>(h);
  const long double lc = log_choose(n - 1, segments - 1);
  out.log_normalizer = static_cast<double>(lse - lc);
  out.log_joint = static_cast<double>(lse - 2.0L * lc + log_prior_k);

  const long double top = *std::max_element(loglik.begin(), loglik.end());
  const long double tol = 1e-10L * std::max(1.0L, std::abs(top));
  for (std::size_t s = 0; s < loglik.size(); ++s) {
    if (loglik[s] >= top - tol) {
      out.map = out.segmentations[s];
      break;
    }
  }

  // marginals and pairwise transitions by direct accumulation
  std::vector<long double> mu(n * segments, 0.0L);
  std::vector<long double> pair_stay(n * segments, 0.0L);
  std::vector<long double> pair_adv(n * segments, 0.0L);
  for (std::size_t s = 0; s < loglik.size(); ++s) {
    const auto labels = out.segmentations[s].labels();
    for (std::size_t i = 0; i < n; ++i) {
      mu[i * segments + labels[i]] += prob[s];
      if (i == 0) continue;
      const std::size_t from = labels[i - 1];
      (labels[i] == from ? pair_stay : pair_adv)[i * segments + from] += prob[s];
    }
  }
  out.marginal = Table(n, segments);
  out.stay = Table(n, segments);
  out.advance = Table(n, segments);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < segments; ++k) {
      out.marginal(i, k) = static_cast<double>(mu[i * segments + k]);
      if (i == 0) continue;
      const long double from = mu[(i - 1) * segments + k];
      if (from > 0.0L) {
        out.stay(i, k) = static_cast<double>(pair_stay[i * segments + k] / from);
        out.advance(i, k) = static_cast<double>(pair_adv[i * segments + k] / from);
      }
    }
  }
  return out;
}

ChangePointSet brute_optimal_segmentation(std::span<const double> data, const SegmentModel& model,
                                          std::size_t segments) {
  check_size(data.size(), segments);
  validate_series(model.family, data);
  const auto all = enumerate_segmentations(data.size(), segments);
  std::vector<long double> scores;
  scores.reserve(all.size());
  for (const auto& cps : all) {
    const EmissionSpec spec = params_from_changepoints(data, cps, model);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < cps.segment_count(); ++k) {
      for (std::size_t i = cps.segment_begin(k); i < cps.segment_end(k); ++i) {
        acc += spec.log_pdf(k, data[i]);
      }
    }
    scores.push_back(acc);
  }
  const long double top = *std::max_element(scores.begin(), scores.end());
  const long double tol = 1e-10L * std::max(1.0L, std::abs(top));
  for (std::size_t s = 0; s < scores.size(); ++s) {
    if (scores[s] >= top - tol) return all[s];
  }
  return all.front();
}

double naive_rand_index(const ChangePointSet& a, const ChangePointSet& b) {
  if (a.length() != b.length()) throw InputError("Rand index of segmentations of different length");
  const std::size_t n = a.length();
  if (n < 2) return 1.0;
  const auto la = a.labels();
  const auto lb = b.labels();
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((la[i] == la[j]) == (lb[i] == lb[j])) ++agree;
    }
  }
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

}  // namespace iclseg::oracle

#include "iclseg/icl.hpp"
#include "iclseg/random.hpp"

namespace iclseg::oracle {

RandomInstance random_instance(std::uint64_t seed, std::size_t min_n, std::size_t max_n,
                               std::size_t max_k) {
  Rng rng(seed);
  const std::size_t n = rng.uniform_int(min_n, max_n);
  const std::size_t segments = rng.uniform_int(1, std::min(max_k, n));
  const Family family = static_cast<Family>(rng.uniform_int(0, 2));

  // a random truth to draw data from
  std::vector<std::size_t> pool(n - 1);
  for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j + 1;
  for (std::size_t j = 0; j + 1 < segments; ++j) {
    std::swap(pool[j], pool[rng.uniform_int(j, pool.size() - 1)]);
  }
  std::vector<std::size_t> taus(pool.begin(), pool.begin() + (segments - 1));
  std::sort(taus.begin(), taus.end());
  const ChangePointSet truth(n, taus);

  RandomInstance inst;
  inst.model.family = family;
  inst.model.shared_variance = rng.uniform() < 0.5;
  inst.model.variance = 0.3 + 2.7 * rng.uniform();
  inst.model.dispersion = family == Family::negbin ? 0.5 + 19.5 * rng.uniform() : kDispersionMax;

  std::vector<double> level(segments);
  for (auto& m : level) m = family == Family::normal ? -3.0 + 6.0 * rng.uniform() : 0.5 + 7.5 * rng.uniform();
  inst.data.resize(n);
  const auto labels = truth.labels();
  for (std::size_t i = 0; i < n; ++i) {
    const double m = level[labels[i]];
    switch (family) {
      case Family::normal: inst.data[i] = m + std::sqrt(inst.model.variance) * rng.normal(); break;
      case Family::poisson: inst.data[i] = static_cast<double>(rng.poisson(m)); break;
      case Family::negbin:
        inst.data[i] = static_cast<double>(rng.negative_binomial(m, inst.model.dispersion));
        break;
    }
  }

  // per-segment normal MLEs can hit the variance floor on singletons, which
  // makes emissions degenerate; those instances use random parameters instead
  const bool fitted = rng.uniform() < 0.5;
  if (fitted && (family != Family::normal || inst.model.shared_variance)) {
    inst.emission = params_from_changepoints(inst.data, truth, inst.model);
  } else {
    inst.emission.family = family;
    inst.emission.shared_variance = inst.model.shared_variance;
    inst.emission.dispersion = inst.model.dispersion;
    for (std::size_t k = 0; k < segments; ++k) {
      inst.emission.means.push_back(family == Family::normal ? -3.0 + 6.0 * rng.uniform()
                                                             : 0.2 + 9.8 * rng.uniform());
      if (family == Family::normal) {
        inst.emission.variances.push_back(inst.model.shared_variance ? inst.model.variance
                                                                     : 0.3 + 2.7 * rng.uniform());
      }
    }
  }
  return inst;
}

double EquivalenceReport::max_deviation() const {
  return std::max({marginal, transition, entropy, log_joint});
}

EquivalenceReport check_equivalence(std::size_t instances, std::uint64_t seed) {
  EquivalenceReport report;
  for (std::size_t r = 0; r < instances; ++r) {
    const RandomInstance inst = random_instance(derive_seed(seed, r));
    const std::size_t n = inst.data.size();
    const std::size_t segments = inst.emission.segment_count();
    const double log_prior_k = -std::log(4.0);
    const ChmmSpec spec = make_chmm_spec(inst.emission, n, std::nullopt, log_prior_k);
    const FBState fb = forward_backward(spec, inst.data);
    const Posteriors post = posteriors(fb);
    const EnumeratedPosterior exact = brute_posterior(inst.data, inst.emission, log_prior_k);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < segments; ++k) {
        report.marginal =
            std::max(report.marginal, std::abs(post.marginal(i, k) - exact.marginal(i, k)));
        if (i == 0) continue;
        report.transition =
            std::max({report.transition, std::abs(post.stay(i, k) - exact.stay(i, k)),
                      std::abs(post.advance(i, k) - exact.advance(i, k))});
      }
    }
    report.entropy = std::max(report.entropy, std::abs(entropy(post) - exact.entropy));
    report.log_joint = std::max(report.log_joint, std::abs(log_joint(spec, fb) - exact.log_joint));
    if (!(viterbi(spec, inst.data) == exact.map)) ++report.map_mismatches;

    const SegPath path = dp_segment(inst.data, inst.model, segments);
    if (!(path.at(segments).changepoints ==
          brute_optimal_segmentation(inst.data, inst.model, segments))) {
      ++report.dp_mismatches;
    }
    ++report.instances;
  }
  return report;
}

}  // namespace iclseg::oracle
