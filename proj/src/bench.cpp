#include "iclseg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "iclseg/chmm.hpp"
#include "iclseg/errors.hpp"
#include "iclseg/icl.hpp"
#include "iclseg/random.hpp"
#include "iclseg/simulate.hpp"

namespace iclseg {

double fit_growth_exponent(std::span<const ScalingPoint> points) {
  if (points.size() < 2) throw InputError("need at least two sizes to fit a growth exponent");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += std::log(static_cast<double>(p.n));
    my += std::log(p.seconds);
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    sxy += dx * (std::log(p.seconds) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingReport measure_scaling(std::span<const std::size_t> lengths, std::size_t segments,
                              std::uint64_t seed, int repeats) {
  ScalingReport report;
  report.segments = segments;
  for (std::size_t idx = 0; idx < lengths.size(); ++idx) {
    const std::size_t n = lengths[idx];
    if (segments > n) throw InputError("more segments than observations");
    DesignSpec design;
    std::vector<std::size_t> taus;
    for (std::size_t k = 1; k < segments; ++k) taus.push_back(k * n / segments);
    design.truth = ChangePointSet(n, taus);
    for (std::size_t k = 0; k < segments; ++k) design.means.push_back(k % 2 == 0 ? 1.0 : 4.0);
    design.seed = derive_seed(seed, idx);
    const auto series = simulate(design);

    EmissionSpec emission;
    emission.family = Family::poisson;
    emission.means = design.means;
    const ChmmSpec spec = make_chmm_spec(emission, n);

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      const auto start = std::chrono::steady_clock::now();
      const FBState fb = forward_backward(spec, series.data);
      volatile double h = entropy(posteriors(fb));
      (void)h;
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    report.points.push_back({n, best});
  }
  report.exponent = fit_growth_exponent(report.points);
  return report;
}

nlohmann::json to_json(const ScalingReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) points.push_back({{"n", p.n}, {"seconds", p.seconds}});
  return {{"k", report.segments}, {"points", std::move(points)}, {"exponent", report.exponent}};
}

}  // namespace iclseg
