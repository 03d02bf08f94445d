#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "iclseg/changepoints.hpp"
#include "iclseg/emission.hpp"

namespace iclseg {

// Constrained segment chain for a fixed number of segments K: states 1..K,
// S_1 = 1, transitions of 0 or +1 with constant advance probability eta, and
// an absorbing junk state K+1. The junk state is implicit: backward
// quantities only keep paths that sit in state K at position n.
struct ChmmSpec {
  std::size_t n = 0;
  std::size_t segments = 1;
  double eta = 0.5;
  EmissionSpec emission;
  double log_prior_k = 0.0;  // log P(K)

  // Throws InputError unless 0 < eta < 1, 1 <= K <= n and the emission is valid.
  void validate() const;
};

// (K-1)/(n-1), which maximizes the chain's prior mass on segmentations with
// exactly K segments; 0.5 when that ratio is 0 or 1.
double default_eta(std::size_t n, std::size_t segments);

ChmmSpec make_chmm_spec(EmissionSpec emission, std::size_t n, std::optional<double> eta = {},
                        double log_prior_k = 0.0);

// Dense row-major n x K table.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// log g_{theta_k}(x_i) for every position and segment.
Table log_emission_table(const EmissionSpec& emission, std::span<const double> data);

// One direction of the recursion, held in log space: log_values(i, k) is
// log F_i(k) or log B_i(k), and -inf marks cells no admissible path visits.
// A column of a long, sharply segmented series can span far more than the
// double range, so the per-cell log-sum-exp replaces column rescaling.
struct LogPass {
  Table log_values;

  double log_value(std::size_t i, std::size_t k) const { return log_values(i, k); }
};

// F_i(k) = P(X_{1:i}, S_i = k). Throws NumericalError if a column has no
// finite entry.
LogPass forward(const ChmmSpec& spec, std::span<const double> data);
// B_i(k) = P(X_{i+1:n}, S_n = K | S_i = k).
LogPass backward(const ChmmSpec& spec, std::span<const double> data);

struct FBState {
  std::size_t segments = 0;
  double eta = 0.5;
  Table log_emission;
  LogPass forward;
  LogPass backward;
  double log_likelihood = 0.0;  // log F_1(1) B_1(1): data and chain mass over M_K
  double log_prior_mass = 0.0;  // log F0_1(1) B0_1(1): chain mass over M_K alone

  std::size_t length() const noexcept { return log_emission.rows(); }
};

FBState forward_backward(const ChmmSpec& spec, std::span<const double> data);

// log P(S in M_K | eta) from the empty-emission recursions.
double log_prior_mass(const ChmmSpec& spec);

// mu_i(k) and the posterior transitions out of (i-1, k). Row 0 of the
// transition tables is unused. Transitions out of a cell with zero marginal
// are zero.
struct Posteriors {
  Table marginal;
  Table stay;     // pi_i(k, k)
  Table advance;  // pi_i(k, k+1)
};

Posteriors posteriors(const FBState& fb);

// log P(X, K | Theta_K) = log P(K) - log C(n-1, K-1) + log(F_1(1)B_1(1))
//                        - log(F0_1(1)B0_1(1)).
// The chain mass eta^(K-1) (1-eta)^(n-K) cancels in the ratio, which leaves
// sum_S P(X|S) / C(n-1, K-1); the leading factor divides by C(n-1, K-1) once more.
double log_joint(const ChmmSpec& spec, const FBState& fb);

// Most probable segmentation; among ties the earliest change-points win.
ChangePointSet viterbi(const ChmmSpec& spec, std::span<const double> data);

}  // namespace iclseg
