#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace netrefine {

// Row-major 0-based (row, col) indexing everywhere.
struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Offset {
  int drow;
  int dcol;
};

// The 8 Moore offsets in row-major order of the 3x3 window.
inline constexpr std::array<Offset, 8> kMooreOffsets{{
    {-1, -1}, {-1, 0}, {-1, 1},
    {0, -1},           {0, 1},
    {1, -1},  {1, 0},  {1, 1},
}};

class GridShape {
 public:
  // Throws ParameterError unless rows >= 1 and cols >= 1.
  GridShape(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const {
    return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  }

  bool contains(int row, int col) const {
    return row >= 0 && row < rows_ && col >= 0 && col < cols_;
  }
  bool contains(Pixel p) const { return contains(p.row, p.col); }

  std::size_t index(Pixel p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(p.col);
  }
  Pixel pixel(std::size_t index) const {
    return {static_cast<int>(index / static_cast<std::size_t>(cols_)),
            static_cast<int>(index % static_cast<std::size_t>(cols_))};
  }

  std::string to_string() const;

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  int rows_;
  int cols_;
};

// Throws ShapeError naming both shapes when they differ.
void require_same_shape(const GridShape& a, const GridShape& b,
                        const char* context);

class BinaryMask {
 public:
  explicit BinaryMask(GridShape shape);
  // `bits` must hold rows*cols entries; any nonzero entry is stored as 1.
  BinaryMask(GridShape shape, std::span<const std::uint8_t> bits);

  static BinaryMask from_pixels(GridShape shape, std::span<const Pixel> pixels);

  const GridShape& shape() const { return shape_; }
  int rows() const { return shape_.rows(); }
  int cols() const { return shape_.cols(); }

  bool test(Pixel p) const { return bits_[shape_.index(p)] != 0; }
  bool test(int row, int col) const { return test(Pixel{row, col}); }
  // Out-of-bounds reads as background.
  bool test_or_zero(int row, int col) const {
    return shape_.contains(row, col) && test(row, col);
  }
  void set(Pixel p, bool value = true) { bits_[shape_.index(p)] = value ? 1 : 0; }
  void reset(Pixel p) { set(p, false); }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  GridShape shape_;
  std::vector<std::uint8_t> bits_;
};

class LikelihoodRaster {
 public:
  // All-zero raster.
  explicit LikelihoodRaster(GridShape shape);
  // Throws InputError if any value is NaN or outside [0, 1].
  LikelihoodRaster(GridShape shape, std::vector<float> values);

  const GridShape& shape() const { return shape_; }
  float at(Pixel p) const { return values_[shape_.index(p)]; }
  void set(Pixel p, float value);
  std::span<const float> values() const { return values_; }

  friend bool operator==(const LikelihoodRaster&, const LikelihoodRaster&) = default;

 private:
  GridShape shape_;
  std::vector<float> values_;
};

// In-bounds Moore neighbours of p in row-major window order. Throws
// BoundsError if p itself is outside the grid.
std::vector<Pixel> moore_neighbors(Pixel p, const GridShape& shape);

// Number of 1s among the in-bounds Moore neighbours of p.
int neighbor_count(const BinaryMask& mask, Pixel p);

std::size_t count_ones(const BinaryMask& mask);

// Foreground pixels in row-major order.
std::vector<Pixel> to_pixels(const BinaryMask& mask);

BinaryMask unite(const BinaryMask& a, const BinaryMask& b);
BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);
// a \ b
BinaryMask subtract(const BinaryMask& a, const BinaryMask& b);
BinaryMask complement(const BinaryMask& mask);
bool is_subset(const BinaryMask& sub, const BinaryMask& super);

// Pixels with value >= tau.
BinaryMask threshold(const LikelihoodRaster& raster, double tau);

}  // namespace netrefine
