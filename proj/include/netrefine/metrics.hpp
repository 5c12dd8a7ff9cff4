#pragma once

#include <cstddef>

#include "netrefine/raster.hpp"

namespace netrefine {

// Shape of the r-neighbourhood. Square is the Chebyshev window of side 2r+1;
// Disk keeps offsets with dr^2 + dc^2 <= r^2.
enum class Neighborhood { kSquare, kDisk };

struct RConfusion {
  int r = 0;
  std::size_t rtp = 0;
  std::size_t rfp = 0;
  std::size_t rfn = 0;

  friend bool operator==(const RConfusion&, const RConfusion&) = default;
};

struct ScoreSet {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;
};

// rTP: predicted pixels with a ground-truth pixel in their r-neighbourhood.
// rFP: predicted pixels without one. rFN: ground-truth pixels with no
// predicted pixel in their r-neighbourhood.
RConfusion r_confusion(const BinaryMask& pred, const BinaryMask& gt, int r,
                       Neighborhood shape = Neighborhood::kSquare);

// Each score is 0 when its denominator is 0.
ScoreSet scores(const RConfusion& c);

ScoreSet conventional_scores(const BinaryMask& pred, const BinaryMask& gt);

}  // namespace netrefine
