#pragma once

#include <span>

#include "netrefine/raster.hpp"

namespace netrefine {

// Pixel sets are represented as masks over the analysed grid.
struct ReachabilityPartition {
  BinaryMask reachable;           // R
  BinaryMask unreachable;         // U, already restricted to the ground truth
  BinaryMask directly_connected;  // C, subset of R

  std::size_t reachable_count() const { return count_ones(reachable); }
  std::size_t unreachable_count() const { return count_ones(unreachable); }
  // |U| / (|R| + |U|), 0 for an empty network.
  double unreachable_fraction() const;
};

// Network pixels having a water pixel among their 8 Moore neighbours. The
// centre of the neighbourhood is not consulted: a network pixel lying on water
// with no water neighbour is not directly connected.
BinaryMask directly_connected(const BinaryMask& network, const BinaryMask& water);

// Every network pixel 8-connected to one of `seeds` (seeds included). Throws
// InputError if a seed is not a network pixel.
BinaryMask reachable_closure(const BinaryMask& network, std::span<const Pixel> seeds);
BinaryMask reachable_closure(const BinaryMask& network, const BinaryMask& seeds);

// C = directly_connected(network, water); R = closure of C;
// U = (network \ R) intersected with ground_truth.
ReachabilityPartition partition(const BinaryMask& network, const BinaryMask& water,
                                const BinaryMask& ground_truth);

}  // namespace netrefine
