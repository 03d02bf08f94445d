#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iclseg/changepoints.hpp"
#include "iclseg/emission.hpp"

namespace iclseg {

// Ground truth of a simulated series.
struct DesignSpec {
  std::string name;
  ChangePointSet truth;
  Family family = Family::poisson;
  std::vector<double> means;  // one per true segment
  double dispersion = kDispersionMax;  // negbin only
  std::uint64_t seed = 0;
};

struct SimulatedSeries {
  std::vector<double> data;
  DesignSpec design;
};

// Draws a series from `design` (Poisson or negative binomial segments).
SimulatedSeries simulate(const DesignSpec& design);

// n = 500, breakpoints {22, 65, 108, 219, 252, 435}; odd segments mean 1,
// even segments mean 1 + lambda_gap.
SimulatedSeries small_design(double lambda_gap, std::uint64_t seed);

// n = 50,000, K = 40; 39 breakpoints drawn uniformly without replacement,
// redrawn until every segment has length >= 25; means alternate 1, 1 + lambda_gap.
SimulatedSeries large_design(double lambda_gap, std::uint64_t seed);

// n = 1,000 with breakpoints {100, 130, 200, 475, 500, 600, 630, 800, 975}.
// The ten segment means cycle through 1, 4.3, 1.15, 6, 4.2 twice in order.
SimulatedSeries baumwelch_design(std::uint64_t seed);

enum class DesignKind { small, large, bw };
DesignKind parse_design(std::string_view name);
SimulatedSeries make_design(DesignKind kind, double lambda_gap, std::uint64_t seed);

}  // namespace iclseg
