#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace iclseg {

struct ScalingPoint {
  std::size_t n = 0;
  double seconds = 0.0;  // best of the repeats
};

struct ScalingReport {
  std::size_t segments = 0;
  std::vector<ScalingPoint> points;
  double exponent = 0.0;  // least-squares slope of log(seconds) on log(n)
};

double fit_growth_exponent(std::span<const ScalingPoint> points);

// Times forward-backward + posteriors + entropy on Poisson series of each
// length with `segments` evenly spaced segments (means alternating 1 and 4).
ScalingReport measure_scaling(std::span<const std::size_t> lengths, std::size_t segments,
                              std::uint64_t seed, int repeats = 3);

nlohmann::json to_json(const ScalingReport& report);

}  // namespace iclseg
