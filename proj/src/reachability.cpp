#include "netrefine/reachability.hpp"

#include <deque>
#include <string>

#include "netrefine/error.hpp"

namespace netrefine {

double ReachabilityPartition::unreachable_fraction() const {
  const double r = static_cast<double>(reachable_count());
  const double u = static_cast<double>(unreachable_count());
  return r + u > 0.0 ? u / (r + u) : 0.0;
}

BinaryMask directly_connected(const BinaryMask& network, const BinaryMask& water) {
  require_same_shape(network.shape(), water.shape(), "directly_connected");
  BinaryMask out(network.shape());
  for (int r = 0; r < network.rows(); ++r) {
    for (int c = 0; c < network.cols(); ++c) {
      if (!network.test(r, c)) continue;
      for (auto [dr, dc] : kMooreOffsets) {
        if (water.test_or_zero(r + dr, c + dc)) {
          out.set({r, c});
          break;
        }
      }
    }
  }
  return out;
}

namespace {

// FIFO flood fill over 8-connected network pixels, seeds queued in row-major order.
BinaryMask flood(const BinaryMask& network, std::deque<Pixel> queue, BinaryMask visited) {
  const GridShape& shape = network.shape();
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : kMooreOffsets) {
      const Pixel q{p.row + dr, p.col + dc};
      if (shape.contains(q) && network.test(q) && !visited.test(q)) {
        visited.set(q);
        queue.push_back(q);
      }
    }
  }
  return visited;
}

}  // namespace

BinaryMask reachable_closure(const BinaryMask& network, std::span<const Pixel> seeds) {
  BinaryMask visited(network.shape());
  for (Pixel s : seeds) {
    if (!network.shape().contains(s) || !network.test(s)) {
      throw InputError("seed (" + std::to_string(s.row) + "," + std::to_string(s.col) +
                       ") is not a network pixel");
    }
    visited.set(s);
  }
  std::deque<Pixel> queue;
  for (Pixel s : to_pixels(visited)) queue.push_back(s);
  return flood(network, std::move(queue), std::move(visited));
}

BinaryMask reachable_closure(const BinaryMask& network, const BinaryMask& seeds) {
  require_same_shape(network.shape(), seeds.shape(), "reachable_closure");
  const auto pixels = to_pixels(seeds);
  return reachable_closure(network, pixels);
}

ReachabilityPartition partition(const BinaryMask& network, const BinaryMask& water,
                                const BinaryMask& ground_truth) {
  require_same_shape(network.shape(), ground_truth.shape(), "partition");
  BinaryMask c = directly_connected(network, water);
  BinaryMask r = reachable_closure(network, c);
  BinaryMask u = intersect(subtract(network, r), ground_truth);
  return {std::move(r), std::move(u), std::move(c)};
}

}  // namespace netrefine
