#include "netrefine/completion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "netrefine/error.hpp"

namespace netrefine {

LocalGraph::LocalGraph(Pixel origin, int rows, int cols, std::vector<std::int32_t> slot_of_cell,
                       std::vector<Pixel> pixels, std::vector<std::uint32_t> arc_begin,
                       std::vector<Arc> arcs)
    : origin_(origin),
      rows_(rows),
      cols_(cols),
      slot_of_cell_(std::move(slot_of_cell)),
      pixels_(std::move(pixels)),
      arc_begin_(std::move(arc_begin)),
      arcs_(std::move(arcs)) {}

std::optional<std::uint32_t> LocalGraph::slot(Pixel p) const {
  const int r = p.row - origin_.row;
  const int c = p.col - origin_.col;
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return std::nullopt;
  const std::int32_t s = slot_of_cell_[static_cast<std::size_t>(r) * cols_ + c];
  if (s < 0) return std::nullopt;
  return static_cast<std::uint32_t>(s);
}

std::vector<Terminal> detect_terminals(const BinaryMask& unreachable) {
  std::vector<Terminal> out;
  for (Pixel p : to_pixels(unreachable)) {
    if (neighbor_count(unreachable, p) <= 1) out.push_back({p});
  }
  return out;
}

BinaryMask water_edge_points(const BinaryMask& water) {
  BinaryMask out(water.shape());
  for (Pixel p : to_pixels(water)) {
    if (neighbor_count(water, p) < 8) out.set(p);
  }
  return out;
}

namespace {

bool within(Pixel a, Pixel b, double rho) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc) <= rho;
}

}  // namespace

std::vector<Pixel> pair_sources(const Terminal& t, std::span<const Pixel> candidates,
                                double rho) {
  std::vector<Pixel> out;
  for (Pixel p : candidates) {
    if (within(p, t.at, rho)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Pixel> pair_sources(const Terminal& t, const BinaryMask& candidates, double rho) {
  std::vector<Pixel> out;
  if (!(rho >= 0.0)) return out;
  const int reach = static_cast<int>(std::floor(rho));
  const GridShape& shape = candidates.shape();
  for (int r = std::max(0, t.at.row - reach); r <= std::min(shape.rows() - 1, t.at.row + reach); ++r) {
    for (int c = std::max(0, t.at.col - reach); c <= std::min(shape.cols() - 1, t.at.col + reach); ++c) {
      if (candidates.test(r, c) && within({r, c}, t.at, rho)) out.push_back({r, c});
    }
  }
  return out;
}

WeightRaster build_weight_raster(std::span<const Terminal> terminals, const LikelihoodRaster& w,
                                 const BinaryMask& precompletion, int rho, double alpha) {
  require_same_shape(w.shape(), precompletion.shape(), "build_weight_raster");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ParameterError("confidence threshold alpha must lie in [0, 1), got " +
                         std::to_string(alpha));
  }
  if (rho < 0) throw ParameterError("rho must be non-negative");

  const GridShape& shape = w.shape();
  WeightRaster x(shape);
  for (Pixel p : to_pixels(precompletion)) x.set(p, 1);
  const auto alpha_f = static_cast<float>(alpha);

  for (const Terminal& t : terminals) {
    if (!shape.contains(t.at)) throw BoundsError("terminal outside grid");
    for (int r = std::max(0, t.at.row - rho); r <= std::min(shape.rows() - 1, t.at.row + rho); ++r) {
      for (int c = std::max(0, t.at.col - rho); c <= std::min(shape.cols() - 1, t.at.col + rho); ++c) {
        const Pixel n{r, c};
        if (n == t.at) continue;
        // Single precision throughout, matching the raster: 0.1f stays 10.
        const float wn = w.at(n);
        if (wn > alpha_f && x.at(n) == 0) {
          x.set(n, static_cast<std::uint32_t>(std::floor(1.0f / wn)));
        }
      }
    }
  }
  return x;
}

LocalGraph build_local_graph(const WeightRaster& weights, const Terminal& t, int rho) {
  const GridShape& shape = weights.shape();
  if (!shape.contains(t.at)) throw BoundsError("terminal outside grid");
  if (!weights.traversable(t.at)) {
    throw InputError("terminal (" + std::to_string(t.at.row) + "," +
                     std::to_string(t.at.col) + ") is not traversable");
  }
  if (rho < 0) throw ParameterError("rho must be non-negative");

  const int r0 = std::max(0, t.at.row - rho);
  const int r1 = std::min(shape.rows() - 1, t.at.row + rho);
  const int c0 = std::max(0, t.at.col - rho);
  const int c1 = std::min(shape.cols() - 1, t.at.col + rho);
  const int rows = r1 - r0 + 1;
  const int cols = c1 - c0 + 1;

  std::vector<std::int32_t> slot_of_cell(static_cast<std::size_t>(rows) * cols, -1);
  std::vector<Pixel> pixels;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (weights.traversable({r, c})) {
        slot_of_cell[static_cast<std::size_t>(r - r0) * cols + (c - c0)] =
            static_cast<std::int32_t>(pixels.size());
        pixels.push_back({r, c});
      }
    }
  }

  auto slot_at = [&](int r, int c) -> std::int32_t {
    if (r < r0 || r > r1 || c < c0 || c > c1) return -1;
    return slot_of_cell[static_cast<std::size_t>(r - r0) * cols + (c - c0)];
  };

  std::vector<std::uint32_t> arc_begin;
  std::vector<LocalGraph::Arc> arcs;
  arc_begin.reserve(2 * pixels.size() + 1);
  for (std::uint32_t k = 0; k < pixels.size(); ++k) {
    const Pixel p = pixels[k];
    // in-node: the split arc carrying the pixel weight.
    arc_begin.push_back(static_cast<std::uint32_t>(arcs.size()));
    arcs.push_back({LocalGraph::out_node(k), weights.at(p)});
    // out-node: free moves into every traversable Moore neighbour.
    arc_begin.push_back(static_cast<std::uint32_t>(arcs.size()));
    for (auto [dr, dc] : kMooreOffsets) {
      const std::int32_t s = slot_at(p.row + dr, p.col + dc);
      if (s >= 0) arcs.push_back({LocalGraph::in_node(static_cast<std::uint32_t>(s)), 0});
    }
  }
  arc_begin.push_back(static_cast<std::uint32_t>(arcs.size()));

  return LocalGraph({r0, c0}, rows, cols, std::move(slot_of_cell), std::move(pixels),
                    std::move(arc_begin), std::move(arcs));
}

std::optional<CompletionPath> solve_instance(const CompletionInstance& instance) {
  const LocalGraph& g = instance.graph;
  const auto origin = g.slot(instance.terminal.at);
  if (!origin) return std::nullopt;

  std::vector<bool> is_source(g.pixel_count(), false);
  bool any_source = false;
  for (Pixel s : instance.sources) {
    if (auto k = g.slot(s)) {
      is_source[*k] = true;
      any_source = true;
    }
  }
  if (!any_source) return std::nullopt;

  // Lexicographic (cost, pixel count) labels; the node id breaks heap ties so
  // the traversal order is fully deterministic.
  using Label = std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>;
  constexpr auto kInf = std::numeric_limits<std::uint64_t>::max();
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> cost(n, kInf);
  std::vector<std::uint32_t> hops(n, 0);
  std::vector<std::int64_t> pred(n, -1);
  std::vector<bool> done(n, false);
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;

  const std::uint32_t start = LocalGraph::in_node(*origin);
  cost[start] = 0;
  heap.emplace(0, 0, start);

  std::optional<std::tuple<std::uint64_t, std::uint32_t, Pixel, std::uint32_t>> best;
  while (!heap.empty()) {
    const auto [d, h, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    if (best && std::make_pair(d, h) > std::make_pair(std::get<0>(*best), std::get<1>(*best))) break;
    done[u] = true;

    if (u % 2 == 1 && is_source[LocalGraph::slot_of(u)]) {
      const Pixel s = g.pixel(LocalGraph::slot_of(u));
      auto candidate = std::make_tuple(d, h, s, u);
      if (!best || candidate < *best) best = candidate;
    }

    for (const auto& arc : g.arcs_from(u)) {
      const std::uint64_t nd = d + arc.weight;
      const std::uint32_t nh = h + (u % 2 == 0 ? 1u : 0u);
      if (done[arc.target]) continue;
      if (std::make_pair(nd, nh) < std::make_pair(cost[arc.target], hops[arc.target])) {
        cost[arc.target] = nd;
        hops[arc.target] = nh;
        pred[arc.target] = u;
        heap.emplace(nd, nh, arc.target);
      }
    }
  }
  if (!best) return std::nullopt;

  CompletionPath path;
  path.cost = std::get<0>(*best);
  for (std::int64_t v = std::get<3>(*best); v >= 0; v = pred[static_cast<std::size_t>(v)]) {
    if (v % 2 == 1) path.pixels.push_back(g.pixel(LocalGraph::slot_of(static_cast<std::uint32_t>(v))));
  }
  std::reverse(path.pixels.begin(), path.pixels.end());
  return path;
}

StampResult stamp_paths(const BinaryMask& network, std::span<const CompletionPath> paths) {
  StampResult result{network, 0};
  for (const CompletionPath& path : paths) {
    for (Pixel p : path.pixels) {
      if (!network.shape().contains(p)) throw BoundsError("path pixel outside grid");
      if (!result.network.test(p)) {
        result.network.set(p);
        ++result.pixels_added;
      }
    }
  }
  return result;
}

}  // namespace netrefine
