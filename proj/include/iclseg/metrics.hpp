#pragma once

#include "iclseg/changepoints.hpp"

namespace iclseg {

// Fraction of the C(n, 2) position pairs on which the two segmentations agree
// (same segment in both, or different segments in both). Computed from the
// segment-overlap contingency counts in O(K_a + K_b).
double rand_index(const ChangePointSet& a, const ChangePointSet& b);

}  // namespace iclseg
