#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netrefine/raster.hpp"

namespace netrefine {

// An unreachable network pixel with at most one unreachable Moore neighbour.
struct Terminal {
  Pixel at;

  friend auto operator<=>(const Terminal&, const Terminal&) = default;
};

// Integer node weights of the confidence-weighted grid. Zero means the pixel
// is not traversable.
class WeightRaster {
 public:
  explicit WeightRaster(GridShape shape) : shape_(shape), weights_(shape.size(), 0) {}

  const GridShape& shape() const { return shape_; }
  std::uint32_t at(Pixel p) const { return weights_[shape_.index(p)]; }
  void set(Pixel p, std::uint32_t w) { weights_[shape_.index(p)] = w; }
  bool traversable(Pixel p) const { return at(p) > 0; }

 private:
  GridShape shape_;
  std::vector<std::uint32_t> weights_;
};

// Node-split reduction of the node-weighted grid inside the square window of
// radius rho around a terminal. Every traversable window pixel k becomes an
// in-node 2k and an out-node 2k+1 joined by an arc carrying the pixel weight;
// Moore-adjacent traversable pixels are linked out -> in with weight 0, in
// both directions.
class LocalGraph {
 public:
  struct Arc {
    std::uint32_t target;
    std::uint64_t weight;
  };

  LocalGraph(Pixel origin, int rows, int cols, std::vector<std::int32_t> slot_of_cell,
             std::vector<Pixel> pixels, std::vector<std::uint32_t> arc_begin,
             std::vector<Arc> arcs);

  std::size_t pixel_count() const { return pixels_.size(); }
  std::size_t node_count() const { return 2 * pixels_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  std::span<const Arc> arcs_from(std::uint32_t node) const {
    return {arcs_.data() + arc_begin_[node], arcs_.data() + arc_begin_[node + 1]};
  }

  // Compact slot of a pixel, if it is a traversable pixel inside the window.
  std::optional<std::uint32_t> slot(Pixel p) const;
  Pixel pixel(std::uint32_t slot) const { return pixels_[slot]; }

  static std::uint32_t in_node(std::uint32_t slot) { return 2 * slot; }
  static std::uint32_t out_node(std::uint32_t slot) { return 2 * slot + 1; }
  static std::uint32_t slot_of(std::uint32_t node) { return node / 2; }

 private:
  Pixel origin_;
  int rows_;
  int cols_;
  std::vector<std::int32_t> slot_of_cell_;  // window cell -> slot, -1 if absent
  std::vector<Pixel> pixels_;
  std::vector<std::uint32_t> arc_begin_;  // CSR offsets, node_count()+1 entries
  std::vector<Arc> arcs_;
};

struct CompletionInstance {
  Terminal terminal;
  std::vector<Pixel> sources;
  LocalGraph graph;
};

struct CompletionPath {
  std::vector<Pixel> pixels;  // terminal first, chosen source last
  std::uint64_t cost = 0;     // sum of node weights over `pixels`

  friend bool operator==(const CompletionPath&, const CompletionPath&) = default;
};

struct StampResult {
  BinaryMask network;
  std::size_t pixels_added = 0;
};

// Pixels of `unreachable` with <= 1 unreachable Moore neighbour, row-major.
std::vector<Terminal> detect_terminals(const BinaryMask& unreachable);

// Water pixels with fewer than 8 water Moore neighbours (out-of-grid counts as
// non-water).
BinaryMask water_edge_points(const BinaryMask& water);

// Candidates within Euclidean distance rho (inclusive) of t, row-major.
std::vector<Pixel> pair_sources(const Terminal& t, std::span<const Pixel> candidates,
                                double rho);
std::vector<Pixel> pair_sources(const Terminal& t, const BinaryMask& candidates, double rho);

// Pre-completion pixels get weight 1. For every terminal, each other pixel n of
// its (2 rho + 1)^2 window with w[n] > alpha and weight 0 gets floor(1 / w[n]).
WeightRaster build_weight_raster(std::span<const Terminal> terminals, const LikelihoodRaster& w,
                                 const BinaryMask& precompletion, int rho, double alpha);

// Throws InputError if the terminal pixel is not traversable.
LocalGraph build_local_graph(const WeightRaster& weights, const Terminal& t, int rho);

// Minimum-cost path from the terminal to any source; ties go to fewer pixels,
// then to the lexicographically smallest source. Sources that are not nodes of
// the local graph cannot be reached.
std::optional<CompletionPath> solve_instance(const CompletionInstance& instance);

// ORs every path pixel into `network`; pixels_added counts newly set bits.
StampResult stamp_paths(const BinaryMask& network, std::span<const CompletionPath> paths);

}  // namespace netrefine
