#include "netrefine/morphology.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "netrefine/error.hpp"

namespace netrefine {

namespace {

void check_kernel(int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ParameterError("kernel size must be odd and positive, got " +
                         std::to_string(kernel_size));
  }
}

// One separable pass of a running OR (dilate) or AND (erode) over a window of
// half-width `radius`, along rows (horizontal) or columns.
std::vector<std::uint8_t> window_pass(std::span<const std::uint8_t> in, const GridShape& shape,
                                      int radius, bool horizontal, bool any) {
  const int rows = shape.rows();
  const int cols = shape.cols();
  std::vector<std::uint8_t> out(in.size(), 0);
  const int lines = horizontal ? rows : cols;
  const int length = horizontal ? cols : rows;
  std::vector<int> prefix(static_cast<std::size_t>(length) + 1);
  for (int line = 0; line < lines; ++line) {
    auto at = [&](int k) -> std::size_t {
      return horizontal ? static_cast<std::size_t>(line) * cols + k
                        : static_cast<std::size_t>(k) * cols + line;
    };
    prefix[0] = 0;
    for (int k = 0; k < length; ++k) prefix[k + 1] = prefix[k] + in[at(k)];
    for (int k = 0; k < length; ++k) {
      const int lo = k - radius;
      const int hi = k + radius;
      const int sum = prefix[std::min(hi, length - 1) + 1] - prefix[std::max(lo, 0)];
      if (any) {
        out[at(k)] = sum > 0 ? 1 : 0;
      } else {
        // Out-of-bounds window cells are zeros, so any clipping fails the AND.
        out[at(k)] = (lo >= 0 && hi < length && sum == 2 * radius + 1) ? 1 : 0;
      }
    }
  }
  return out;
}

BinaryMask square_filter(const BinaryMask& mask, int kernel_size, bool any) {
  check_kernel(kernel_size);
  if (kernel_size == 1) return mask;
  const int radius = kernel_size / 2;
  auto pass1 = window_pass(mask.bits(), mask.shape(), radius, true, any);
  auto pass2 = window_pass(pass1, mask.shape(), radius, false, any);
  return BinaryMask(mask.shape(), pass2);
}

// Zhang-Suen neighbourhood P2..P9, clockwise from north.
constexpr std::array<Offset, 8> kClockwise{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

struct Ring {
  std::array<int, 8> p{};  // p[0] = P2 ... p[7] = P9

  int count() const {
    int b = 0;
    for (int v : p) b += v;
    return b;
  }
  int transitions() const {
    int a = 0;
    for (int k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1);
    return a;
  }
};

Ring ring_at(const std::vector<std::uint8_t>& img, const GridShape& shape, int r, int c) {
  Ring ring;
  for (int k = 0; k < 8; ++k) {
    const int rr = r + kClockwise[k].drow;
    const int cc = c + kClockwise[k].dcol;
    ring.p[k] = shape.contains(rr, cc) ? img[shape.index({rr, cc})] : 0;
  }
  return ring;
}

bool simple_non_end(const Ring& ring) {
  const int b = ring.count();
  return b >= 2 && b <= 6 && ring.transitions() == 1;
}

bool candidate(const Ring& ring, bool first_pass) {
  if (!simple_non_end(ring)) return false;
  const auto& p = ring.p;
  const int p2 = p[0], p4 = p[2], p6 = p[4], p8 = p[6];
  if (first_pass) return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
  return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int kernel_size) {
  return square_filter(mask, kernel_size, true);
}

BinaryMask erode(const BinaryMask& mask, int kernel_size) {
  return square_filter(mask, kernel_size, false);
}

BinaryMask thin(const BinaryMask& mask) {
  const GridShape& shape = mask.shape();
  std::vector<std::uint8_t> img(mask.bits().begin(), mask.bits().end());
  std::vector<std::size_t> foreground;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (img[i]) foreground.push_back(i);
  }

  std::vector<std::size_t> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (bool first_pass : {true, false}) {
      marked.clear();
      for (std::size_t i : foreground) {
        if (!img[i]) continue;
        const Pixel p = shape.pixel(i);
        if (candidate(ring_at(img, shape, p.row, p.col), first_pass)) marked.push_back(i);
      }
      for (std::size_t i : marked) {
        const Pixel p = shape.pixel(i);
        if (simple_non_end(ring_at(img, shape, p.row, p.col))) {
          img[i] = 0;
          changed = true;
        }
      }
    }
    std::erase_if(foreground, [&](std::size_t i) { return img[i] == 0; });
  }
  return BinaryMask(shape, img);
}

}  // namespace netrefine
