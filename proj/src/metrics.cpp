#include "netrefine/metrics.hpp"

#include <string>
#include <vector>

#include "netrefine/error.hpp"
#include "netrefine/morphology.hpp"

namespace netrefine {

namespace {

BinaryMask disk_dilate(const BinaryMask& mask, int r) {
  std::vector<Offset> offsets;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      if (dr * dr + dc * dc <= r * r) offsets.push_back({dr, dc});
    }
  }
  BinaryMask out(mask.shape());
  for (Pixel p : to_pixels(mask)) {
    for (auto [dr, dc] : offsets) {
      if (mask.shape().contains(p.row + dr, p.col + dc)) out.set({p.row + dr, p.col + dc});
    }
  }
  return out;
}

BinaryMask neighborhood_cover(const BinaryMask& mask, int r, Neighborhood shape) {
  return shape == Neighborhood::kSquare ? dilate(mask, 2 * r + 1) : disk_dilate(mask, r);
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RConfusion r_confusion(const BinaryMask& pred, const BinaryMask& gt, int r,
                       Neighborhood shape) {
  require_same_shape(pred.shape(), gt.shape(), "r_confusion");
  if (r < 0) throw ParameterError("radius must be non-negative, got " + std::to_string(r));

  // Both neighbourhood shapes are symmetric, so "a gt pixel lies in N_r(p)" is
  // the same as "p lies in the dilation of gt".
  const BinaryMask gt_cover = neighborhood_cover(gt, r, shape);
  const BinaryMask pred_cover = neighborhood_cover(pred, r, shape);

  RConfusion c;
  c.r = r;
  auto p = pred.bits();
  auto y = gt.bits();
  auto yc = gt_cover.bits();
  auto pc = pred_cover.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]) (yc[i] ? c.rtp : c.rfp) += 1;
    if (y[i] && !pc[i]) c.rfn += 1;
  }
  return c;
}

ScoreSet scores(const RConfusion& c) {
  ScoreSet s;
  s.precision = ratio(c.rtp, c.rtp + c.rfp);
  s.recall = ratio(c.rtp, c.rtp + c.rfn);
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  s.iou = ratio(c.rtp, c.rtp + c.rfp + c.rfn);
  return s;
}

ScoreSet conventional_scores(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.shape(), gt.shape(), "conventional_scores");
  std::size_t tp = 0, fp = 0, fn = 0;
  auto p = pred.bits();
  auto y = gt.bits();
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] && y[i];
    fp += p[i] && !y[i];
    fn += !p[i] && y[i];
  }
  return scores({0, tp, fp, fn});
}

}  // namespace netrefine
