#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iclseg {

// Bad input: parse failures, out-of-support values, violated preconditions.
// The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Forward/backward underflow that per-position scaling could not absorb.
// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t segments, std::size_t position)
      : std::runtime_error(what + " (K=" + std::to_string(segments) +
                           ", position " + std::to_string(position) + ")"),
        segments_(segments),
        position_(position) {}

  std::size_t segments() const noexcept { return segments_; }
  // 1-based position of the failing column.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t segments_;
  std::size_t position_;
};

}  // namespace iclseg
