#pragma once

#include "netrefine/raster.hpp"

namespace netrefine {

// Square all-ones structuring element of side `kernel_size` (odd, >= 1).
// Pixels outside the grid count as background for both operators.
BinaryMask dilate(const BinaryMask& mask, int kernel_size);
BinaryMask erode(const BinaryMask& mask, int kernel_size);

// Zhang-Suen thinning to a unit-width 8-connected skeleton.
//
// Each sub-iteration collects its deletion candidates in parallel exactly as
// Zhang-Suen does, then removes them in row-major order, re-checking against
// the partially updated image that the pixel is still a simple non-end point
// (2 <= B <= 6 and A == 1). The re-check keeps two-pixel-thick structures
// (2x2 blocks, thick diagonals) from vanishing, so the number of 8-connected
// components is preserved. The result is a fixed point: thin(thin(m)) == thin(m).
BinaryMask thin(const BinaryMask& mask);

}  // namespace netrefine
