#include "iclseg/changepoints.hpp"

#include <string>

#include "iclseg/errors.hpp"

namespace iclseg {

ChangePointSet::ChangePointSet(std::size_t n, std::vector<std::size_t> breakpoints)
    : n_(n), breakpoints_(std::move(breakpoints)) {
  if (n_ == 0) throw InputError("change-point set over an empty series");
  std::size_t previous = 0;
  for (std::size_t tau : breakpoints_) {
    if (tau <= previous || tau >= n_) {
      throw InputError("breakpoint " + std::to_string(tau) +
                       " out of order or outside [1, " + std::to_string(n_ - 1) + "]");
    }
    previous = tau;
  }
}

std::vector<std::size_t> ChangePointSet::labels() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t k = 0; k < segment_count(); ++k) {
    for (std::size_t i = segment_begin(k); i < segment_end(k); ++i) out[i] = k;
  }
  return out;
}

}  // namespace iclseg
