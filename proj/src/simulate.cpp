#include "iclseg/simulate.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "iclseg/errors.hpp"
#include "iclseg/random.hpp"

namespace iclseg {

namespace {

std::vector<double> alternating_means(std::size_t segments, double lambda_gap) {
  if (!(lambda_gap >= 0.0)) throw InputError("lambda gap must be non-negative");
  std::vector<double> means(segments);
  for (std::size_t k = 0; k < segments; ++k) means[k] = k % 2 == 0 ? 1.0 : 1.0 + lambda_gap;
  return means;
}

}  // namespace

SimulatedSeries simulate(const DesignSpec& design) {
  if (design.means.size() != design.truth.segment_count()) {
    throw InputError("design needs one mean per segment");
  }
  Rng rng(design.seed);
  SimulatedSeries out{std::vector<double>(design.truth.length()), design};
  for (std::size_t k = 0; k < design.truth.segment_count(); ++k) {
    for (std::size_t i = design.truth.segment_begin(k); i < design.truth.segment_end(k); ++i) {
      const double m = design.means[k];
      out.data[i] = static_cast<double>(design.family == Family::negbin
                                            ? rng.negative_binomial(m, design.dispersion)
                                            : rng.poisson(m));
    }
  }
  return out;
}

SimulatedSeries small_design(double lambda_gap, std::uint64_t seed) {
  DesignSpec d;
  d.name = "small";
  d.truth = ChangePointSet(500, {22, 65, 108, 219, 252, 435});
  d.means = alternating_means(7, lambda_gap);
  d.seed = seed;
  return simulate(d);
}

SimulatedSeries large_design(double lambda_gap, std::uint64_t seed) {
  constexpr std::size_t n = 50000;
  constexpr std::size_t changes = 39;
  constexpr std::size_t min_length = 25;
  constexpr int max_attempts = 10000;

  // breakpoints use a stream of their own so the counts stay independent
  Rng rng(derive_seed(seed, 0xb7));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // Floyd's sampling of `changes` distinct values from [1, n-1]
    std::set<std::size_t> chosen;
    for (std::size_t j = n - 1 - changes; j < n - 1; ++j) {
      const std::size_t t = 1 + rng.uniform_int(0, j);
      if (!chosen.insert(t).second) chosen.insert(j + 1);
    }
    std::vector<std::size_t> taus(chosen.begin(), chosen.end());
    bool ok = taus.front() >= min_length && n - taus.back() >= min_length;
    for (std::size_t j = 1; ok && j < taus.size(); ++j) ok = taus[j] - taus[j - 1] >= min_length;
    if (!ok) continue;

    DesignSpec d;
    d.name = "large";
    d.truth = ChangePointSet(n, std::move(taus));
    d.means = alternating_means(changes + 1, lambda_gap);
    d.seed = seed;
    return simulate(d);
  }
  throw std::runtime_error("large design: no admissible breakpoint draw after retries");
}

SimulatedSeries baumwelch_design(std::uint64_t seed) {
  static constexpr double levels[] = {1.0, 4.3, 1.15, 6.0, 4.2};
  DesignSpec d;
  d.name = "bw";
  d.truth = ChangePointSet(1000, {100, 130, 200, 475, 500, 600, 630, 800, 975});
  for (std::size_t k = 0; k < 10; ++k) d.means.push_back(levels[k % 5]);
  d.seed = seed;
  return simulate(d);
}

DesignKind parse_design(std::string_view name) {
  if (name == "small") return DesignKind::small;
  if (name == "large") return DesignKind::large;
  if (name == "bw") return DesignKind::bw;
  throw InputError("unknown design '" + std::string(name) + "'");
}

SimulatedSeries make_design(DesignKind kind, double lambda_gap, std::uint64_t seed) {
  switch (kind) {
    case DesignKind::small: return small_design(lambda_gap, seed);
    case DesignKind::large: return large_design(lambda_gap, seed);
    case DesignKind::bw: return baumwelch_design(seed);
  }
  return small_design(lambda_gap, seed);
}

}  // namespace iclseg
