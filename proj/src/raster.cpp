#include "netrefine/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netrefine/error.hpp"

namespace netrefine {

GridShape::GridShape(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw ParameterError("grid shape must be at least 1x1, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::string GridShape::to_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_same_shape(const GridShape& a, const GridShape& b,
                        const char* context) {
  if (a != b) {
    throw ShapeError(std::string(context) + ": shape mismatch " + a.to_string() +
                     " vs " + b.to_string());
  }
}

BinaryMask::BinaryMask(GridShape shape) : shape_(shape), bits_(shape.size(), 0) {}

BinaryMask::BinaryMask(GridShape shape, std::span<const std::uint8_t> bits)
    : shape_(shape), bits_(shape.size(), 0) {
  if (bits.size() != shape.size()) {
    throw ShapeError("mask data has " + std::to_string(bits.size()) +
                     " cells, shape " + shape.to_string() + " needs " +
                     std::to_string(shape.size()));
  }
  std::transform(bits.begin(), bits.end(), bits_.begin(),
                 [](std::uint8_t b) -> std::uint8_t { return b != 0 ? 1 : 0; });
}

BinaryMask BinaryMask::from_pixels(GridShape shape, std::span<const Pixel> pixels) {
  BinaryMask mask(shape);
  for (Pixel p : pixels) {
    if (!shape.contains(p)) {
      throw BoundsError("pixel (" + std::to_string(p.row) + "," +
                        std::to_string(p.col) + ") outside " + shape.to_string());
    }
    mask.set(p);
  }
  return mask;
}

namespace {

void check_likelihood(float v) {
  if (std::isnan(v) || v < 0.0f || v > 1.0f) {
    throw InputError("likelihood value " + std::to_string(v) +
                     " outside [0, 1]");
  }
}

}  // namespace

LikelihoodRaster::LikelihoodRaster(GridShape shape)
    : shape_(shape), values_(shape.size(), 0.0f) {}

LikelihoodRaster::LikelihoodRaster(GridShape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) {
    throw ShapeError("likelihood data has " + std::to_string(values_.size()) +
                     " cells, shape " + shape_.to_string() + " needs " +
                     std::to_string(shape_.size()));
  }
  std::for_each(values_.begin(), values_.end(), check_likelihood);
}

void LikelihoodRaster::set(Pixel p, float value) {
  check_likelihood(value);
  values_[shape_.index(p)] = value;
}

std::vector<Pixel> moore_neighbors(Pixel p, const GridShape& shape) {
  if (!shape.contains(p)) {
    throw BoundsError("pixel (" + std::to_string(p.row) + "," +
                      std::to_string(p.col) + ") outside " + shape.to_string());
  }
  std::vector<Pixel> out;
  out.reserve(8);
  for (auto [dr, dc] : kMooreOffsets) {
    if (shape.contains(p.row + dr, p.col + dc)) out.push_back({p.row + dr, p.col + dc});
  }
  return out;
}

int neighbor_count(const BinaryMask& mask, Pixel p) {
  int n = 0;
  for (auto [dr, dc] : kMooreOffsets) n += mask.test_or_zero(p.row + dr, p.col + dc);
  return n;
}

std::size_t count_ones(const BinaryMask& mask) {
  auto bits = mask.bits();
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

std::vector<Pixel> to_pixels(const BinaryMask& mask) {
  std::vector<Pixel> out;
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(mask.shape().pixel(i));
  }
  return out;
}

namespace {

template <class Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, const char* what, Op op) {
  require_same_shape(a.shape(), b.shape(), what);
  BinaryMask out(a.shape());
  auto x = a.bits();
  auto y = b.bits();
  auto z = out.bits();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = op(x[i], y[i]) ? 1 : 0;
  return out;
}

}  // namespace

BinaryMask unite(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "unite", [](auto x, auto y) { return x || y; });
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "intersect", [](auto x, auto y) { return x && y; });
}

BinaryMask subtract(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "subtract", [](auto x, auto y) { return x && !y; });
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.shape());
  auto in = mask.bits();
  auto o = out.bits();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = in[i] ? 0 : 1;
  return out;
}

bool is_subset(const BinaryMask& sub, const BinaryMask& super) {
  require_same_shape(sub.shape(), super.shape(), "is_subset");
  auto a = sub.bits();
  auto b = super.bits();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

BinaryMask threshold(const LikelihoodRaster& raster, double tau) {
  BinaryMask out(raster.shape());
  auto v = raster.values();
  auto o = out.bits();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<double>(v[i]) >= tau ? 1 : 0;
  return out;
}

}  // namespace netrefine
