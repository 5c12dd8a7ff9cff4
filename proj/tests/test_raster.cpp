#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "netrefine/error.hpp"
#include "netrefine/morphology.hpp"
#include "netrefine/raster.hpp"
#include "oracles.hpp"

using namespace netrefine;

namespace {

BinaryMask mask_of(GridShape shape, std::vector<Pixel> pixels) {
  return BinaryMask::from_pixels(shape, pixels);
}

// Random 8-connected blob grown from the centre, optionally thickened.
BinaryMask random_blob(std::mt19937_64& rng) {
  const GridShape shape(32, 32);
  BinaryMask m(shape);
  std::uniform_int_distribution<int> steps(20, 160), dir(0, 7), grow(0, 2);
  Pixel p{16, 16};
  m.set(p);
  const int n = steps(rng);
  for (int i = 0; i < n; ++i) {
    const auto [dr, dc] = kMooreOffsets[static_cast<std::size_t>(dir(rng))];
    const Pixel q{std::clamp(p.row + dr, 1, 30), std::clamp(p.col + dc, 1, 30)};
    m.set(q);
    p = q;
  }
  const int k = 2 * grow(rng) + 1;
  return dilate(m, k);
}

}  // namespace

TEST_CASE("grid shape validation") {
  CHECK_THROWS_AS(GridShape(0, 3), ParameterError);
  CHECK_THROWS_AS(GridShape(3, -1), ParameterError);
  const GridShape s(2, 5);
  CHECK(s.size() == 10);
  CHECK(s.index({1, 2}) == 7);
  CHECK(s.pixel(7) == Pixel{1, 2});
  CHECK(s.to_string() == "2x5");
}

TEST_CASE("shape mismatch names both shapes") {
  try {
    require_same_shape(GridShape(4, 4), GridShape(5, 5), "unit");
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("4x4") != std::string::npos);
    CHECK(msg.find("5x5") != std::string::npos);
  }
  CHECK_THROWS_AS(unite(BinaryMask(GridShape(2, 2)), BinaryMask(GridShape(2, 3))), ShapeError);
}

TEST_CASE("likelihood values must lie in [0, 1]") {
  CHECK_THROWS_AS(LikelihoodRaster(GridShape(1, 2), {0.5f, 1.5f}), InputError);
  CHECK_THROWS_AS(LikelihoodRaster(GridShape(1, 1), {std::nanf("")}), InputError);
  CHECK_NOTHROW(LikelihoodRaster(GridShape(1, 2), {0.0f, 1.0f}));
}

TEST_CASE("moore neighbours") {
  const GridShape s33(3, 3);
  CHECK(moore_neighbors({0, 0}, s33) == std::vector<Pixel>{{0, 1}, {1, 0}, {1, 1}});
  CHECK(moore_neighbors({1, 1}, s33).size() == 8);
  CHECK(moore_neighbors({0, 2}, GridShape(1, 3)) == std::vector<Pixel>{{0, 1}});
  CHECK_THROWS_AS(moore_neighbors({3, 0}, s33), BoundsError);

  SUBCASE("symmetric") {
    const GridShape s(5, 7);
    for (int r = 0; r < s.rows(); ++r) {
      for (int c = 0; c < s.cols(); ++c) {
        for (Pixel q : moore_neighbors({r, c}, s)) {
          const auto back = moore_neighbors(q, s);
          CHECK(std::find(back.begin(), back.end(), Pixel{r, c}) != back.end());
        }
      }
    }
  }
}

TEST_CASE("dilate") {
  const GridShape s(5, 5);
  const BinaryMask point = mask_of(s, {{2, 2}});
  const BinaryMask d = dilate(point, 3);
  CHECK(count_ones(d) == 9);
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) CHECK(d.test(r, c));
  }
  CHECK(dilate(point, 1) == point);

  const BinaryMask corner = dilate(mask_of(GridShape(4, 4), {{0, 0}}), 5);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(corner.test(r, c) == (r <= 2 && c <= 2));
  }
  CHECK_THROWS_AS(dilate(point, 2), ParameterError);
  CHECK_THROWS_AS(dilate(point, 0), ParameterError);
}

TEST_CASE("erode") {
  BinaryMask full(GridShape(3, 3));
  for (auto& b : full.bits()) b = 1;
  const BinaryMask e = erode(full, 3);
  CHECK(count_ones(e) == 1);
  CHECK(e.test(1, 1));
  CHECK(erode(full, 1) == full);
  CHECK_THROWS_AS(erode(full, 4), ParameterError);
}

TEST_CASE("morphology properties on random masks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const GridShape s(20, 23);
    const BinaryMask a = oracle::random_mask(s, 0.15, rng);
    const BinaryMask b = unite(a, oracle::random_mask(s, 0.1, rng));
    for (int k : {1, 3, 5}) {
      CHECK(is_subset(dilate(a, k), dilate(b, k)));

      const int h = (k - 1) / 2;
      const BinaryMask lhs = erode(a, k);
      const BinaryMask rhs = complement(dilate(complement(a), k));
      for (int r = h; r < s.rows() - h; ++r) {
        for (int c = h; c < s.cols() - h; ++c) CHECK(lhs.test(r, c) == rhs.test(r, c));
      }
    }
    BinaryMask inner(s);
    for (Pixel p : to_pixels(a)) {
      if (p.row > 0 && p.col > 0 && p.row < s.rows() - 1 && p.col < s.cols() - 1) inner.set(p);
    }
    CHECK(is_subset(inner, erode(dilate(inner, 3), 3)));
  }
}

TEST_CASE("thin a three pixel wide bar") {
  const GridShape s(7, 16);
  BinaryMask bar(s);
  for (int r = 2; r <= 4; ++r) {
    for (int c = 3; c <= 12; ++c) bar.set({r, c});
  }
  const BinaryMask t = thin(bar);
  const auto px = to_pixels(t);
  REQUIRE(!px.empty());
  int lo = 100, hi = -1;
  for (Pixel p : px) {
    CHECK(p.row == 3);
    lo = std::min(lo, p.col);
    hi = std::max(hi, p.col);
  }
  CHECK(lo >= 3);
  CHECK(lo <= 4);
  CHECK(hi <= 12);
  CHECK(hi >= 11);
  CHECK(count_ones(t) == static_cast<std::size_t>(hi - lo + 1));
}

TEST_CASE("thin fixed points") {
  const GridShape s(8, 8);
  BinaryMask diag(s);
  for (int i = 0; i < 8; ++i) diag.set({i, i});
  CHECK(thin(diag) == diag);
  CHECK(thin(BinaryMask(s)) == BinaryMask(s));

  BinaryMask block(GridShape(4, 4));
  for (int r = 1; r <= 2; ++r) {
    for (int c = 1; c <= 2; ++c) block.set({r, c});
  }
  const BinaryMask t = thin(block);
  CHECK(count_ones(t) >= 1);
  CHECK(oracle::component_count(t) == 1);
}

TEST_CASE("thin preserves components and is idempotent on random blobs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask blob = random_blob(rng);
    REQUIRE(oracle::component_count(blob) == 1);
    const BinaryMask t = thin(blob);
    CHECK(is_subset(t, blob));
    CHECK(oracle::component_count(t) == 1);
    CHECK(thin(t) == t);
  }
}

TEST_CASE("thin keeps the component count of scattered masks") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryMask m = oracle::random_mask(GridShape(24, 24), 0.45, rng);
    const BinaryMask t = thin(m);
    CHECK(oracle::component_count(t) == oracle::component_count(m));
    CHECK(thin(t) == t);
  }
}

TEST_CASE("counting and set algebra") {
  const GridShape s(4, 4);
  CHECK(count_ones(BinaryMask(s)) == 0);
  CHECK(count_ones(complement(BinaryMask(s))) == 16);
  CHECK(count_ones(dilate(mask_of(GridShape(5, 5), {{2, 2}}), 3)) == 9);

  const BinaryMask a = mask_of(s, {{0, 0}, {1, 1}, {2, 2}});
  const BinaryMask b = mask_of(s, {{1, 1}, {3, 3}});
  CHECK(count_ones(unite(a, b)) == 4);
  CHECK(to_pixels(intersect(a, b)) == std::vector<Pixel>{{1, 1}});
  CHECK(to_pixels(subtract(a, b)) == std::vector<Pixel>{{0, 0}, {2, 2}});
  CHECK(is_subset(intersect(a, b), a));
  CHECK_FALSE(is_subset(a, b));
  CHECK(neighbor_count(a, {1, 1}) == 2);
  CHECK(neighbor_count(a, {0, 1}) == 2);
}

TEST_CASE("threshold is inclusive") {
  const LikelihoodRaster w(GridShape(1, 3), {0.49f, 0.5f, 1.0f});
  CHECK(to_pixels(threshold(w, 0.5)) == std::vector<Pixel>{{0, 1}, {0, 2}});
}
