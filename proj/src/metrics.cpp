#include "iclseg/metrics.hpp"

#include <algorithm>
#include <cstdint>

#include "iclseg/errors.hpp"

namespace iclseg {

namespace {

std::uint64_t pairs(std::uint64_t m) { return m * (m - (m > 0 ? 1 : 0)) / 2; }

}  // namespace

double rand_index(const ChangePointSet& a, const ChangePointSet& b) {
  if (a.length() != b.length()) throw InputError("Rand index of segmentations of different length");
  const std::uint64_t n = a.length();
  if (n < 2) return 1.0;

  std::uint64_t same_a = 0;
  for (std::size_t k = 0; k < a.segment_count(); ++k) {
    same_a += pairs(a.segment_end(k) - a.segment_begin(k));
  }
  std::uint64_t same_b = 0;
  for (std::size_t k = 0; k < b.segment_count(); ++k) {
    same_b += pairs(b.segment_end(k) - b.segment_begin(k));
  }
  // Non-empty cells of the contingency table are the overlaps met while
  // sweeping both segment lists left to right.
  std::uint64_t same_both = 0;
  std::size_t ka = 0;
  std::size_t kb = 0;
  while (ka < a.segment_count() && kb < b.segment_count()) {
    const std::size_t lo = std::max(a.segment_begin(ka), b.segment_begin(kb));
    const std::size_t hi = std::min(a.segment_end(ka), b.segment_end(kb));
    if (hi > lo) same_both += pairs(hi - lo);
    if (a.segment_end(ka) < b.segment_end(kb)) {
      ++ka;
    } else if (b.segment_end(kb) < a.segment_end(ka)) {
      ++kb;
    } else {
      ++ka;
      ++kb;
    }
  }
  const std::uint64_t agree = pairs(n) - same_a - same_b + 2 * same_both;
  return static_cast<double>(agree) / static_cast<double>(pairs(n));
}

}  // namespace iclseg
