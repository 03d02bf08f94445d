#pragma once

#include <cstdint>
#include <random>

namespace iclseg {

// Portable random source. The engine is std::mt19937_64, whose output is fixed
// by the standard; the variates below are built from its raw 64-bit words, so
// a seed gives the same draws on every platform and standard library
// (std::*_distribution makes no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on (0, 1), 53-bit resolution.
  double uniform();
  // Uniform integer in [lo, hi] (inclusive) by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal();
  double gamma(double shape, double scale);
  std::uint64_t poisson(double mean);
  // Mean m, variance m + m^2 / dispersion (gamma-Poisson mixture).
  std::uint64_t negative_binomial(double mean, double dispersion);

 private:
  std::mt19937_64 engine_;
};

// Seed of stream `stream` under base seed `seed`: the splitmix64 finalizer of
// seed + (stream + 1) * 0x9e3779b97f4a7c15. Replicate r of a batch uses
// stream r.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace iclseg
