#pragma once

#include <cstddef>
#include <vector>

namespace iclseg {

// A segmentation of positions 1..n into K contiguous segments, stored as the
// K-1 breakpoints tau_1 < ... < tau_{K-1}. Segment k covers (tau_{k-1}, tau_k]
// with tau_0 = 0 and tau_K = n, so every breakpoint lies in [1, n-1].
class ChangePointSet {
 public:
  ChangePointSet() = default;
  // Throws InputError if the breakpoints are not strictly increasing in [1, n-1].
  ChangePointSet(std::size_t n, std::vector<std::size_t> breakpoints);

  static ChangePointSet single_segment(std::size_t n) { return ChangePointSet(n, {}); }

  std::size_t length() const noexcept { return n_; }
  std::size_t segment_count() const noexcept { return breakpoints_.size() + 1; }
  const std::vector<std::size_t>& breakpoints() const noexcept { return breakpoints_; }

  // Half-open zero-based index range [begin, end) of segment k (zero-based).
  std::size_t segment_begin(std::size_t k) const noexcept {
    return k == 0 ? 0 : breakpoints_[k - 1];
  }
  std::size_t segment_end(std::size_t k) const noexcept {
    return k + 1 == segment_count() ? n_ : breakpoints_[k];
  }

  // Zero-based segment label of every position (the S_i sequence minus one).
  std::vector<std::size_t> labels() const;

  friend bool operator==(const ChangePointSet&, const ChangePointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> breakpoints_;
};

}  // namespace iclseg
