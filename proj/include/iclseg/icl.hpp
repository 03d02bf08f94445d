#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "iclseg/changepoints.hpp"
#include "iclseg/chmm.hpp"
#include "iclseg/seginit.hpp"

namespace iclseg {

// Entropy (nats) of the posterior over M_K, from the chain factorization
// H = -[sum mu_1 log mu_1 + sum_i sum_k mu_{i-1}(k) sum_k' pi log pi].
double entropy(const Posteriors& post);

struct IclRecord {
  std::size_t segments = 0;
  double log_joint = 0.0;
  double entropy = 0.0;
  double icl = 0.0;  // -log_joint + entropy
  ChangePointSet map;
  InitMethod init = InitMethod::dp;
  double seconds = 0.0;
};

struct IclOptions {
  std::optional<double> eta;          // default: default_eta(n, K)
  std::optional<double> log_prior_k;  // default: 0
};

// Conditional ICL for K segments with parameters fitted on init.at(K).
IclRecord icl_for_k(std::span<const double> data, std::size_t segments, const SegPath& init,
                    InitMethod method, const IclOptions& options = {});

struct SelectOptions {
  std::size_t kmax = 1;
  Family family = Family::poisson;
  InitMethod init = InitMethod::dp;
  bool shared_variance = true;
  std::optional<double> eta;
  // Constant log P(K); default is the uniform prior -log(kmax).
  std::optional<double> log_prior_k;
  std::size_t threads = 0;  // 0: thread_count()
};

struct IclTable {
  std::size_t n = 0;
  Family family = Family::poisson;
  InitMethod init = InitMethod::dp;
  std::vector<IclRecord> records;  // ordered by K = 1..kmax
  std::size_t k_hat = 0;
  double init_seconds = 0.0;

  const IclRecord& selected() const { return records.at(k_hat - 1); }
};

// K with the smallest ICL; ties go to the smaller K.
std::size_t argmin_icl(std::span<const IclRecord> records);

// Runs the initializer once for K = 1..kmax, then the forward-backward pass
// for every K, and picks K-hat.
IclTable select_k(std::span<const double> data, const SelectOptions& options);

// As select_k, reusing precomputed initial segmentations.
IclTable select_k(std::span<const double> data, const SegPath& init, const SelectOptions& options);

}  // namespace iclseg
