#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "netrefine/pipeline.hpp"
#include "netrefine/raster.hpp"

namespace netrefine {

struct SampledPoints {
  std::vector<Pixel> points;
  std::uint64_t seed = 0;
};

// n distinct network pixels drawn uniformly without replacement. Throws
// InputError if the network has fewer than n pixels, ParameterError if n < 2.
SampledPoints sample_points(const BinaryMask& network, std::size_t n, std::uint64_t seed);

// Hop distances between sampled points over the 8-connected network.
struct DistanceSummary {
  std::size_t n = 0;
  std::vector<std::optional<std::uint64_t>> distances;  // n * n, nullopt if disconnected
  std::uint64_t total = 0;                              // over connected pairs i < j
  std::size_t disconnected_pairs = 0;                   // pairs i < j

  const std::optional<std::uint64_t>& at(std::size_t i, std::size_t j) const {
    return distances[i * n + j];
  }

  friend bool operator==(const DistanceSummary&, const DistanceSummary&) = default;
};

// One BFS per point. Throws InputError if a point is not a network pixel.
DistanceSummary apsp(const BinaryMask& network, const SampledPoints& pts, unsigned threads = 1);

// Totals of both summaries restricted to pairs connected in both.
struct CommonTotals {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  std::size_t pairs = 0;
};
CommonTotals common_totals(const DistanceSummary& a, const DistanceSummary& b);

struct RoadTraceEntry {
  int iteration = 0;  // refinement passes applied so far; 0 is the broken input
  std::uint64_t total = 0;
  std::size_t disconnected = 0;
};

struct RoadResult {
  BinaryMask refined;
  std::vector<RoadTraceEntry> trace;
  DistanceSummary reference;  // distances on gt
  DistanceSummary final;      // distances on refined
};

// Gap repair driven by the sampled-pair distance objective. Each pass treats
// every endpoint of the current network as a terminal and connects it to a
// network pixel within rho whose current network distance is more than twice
// the straight-line distance (or infinite). Stops once no more pairs are
// disconnected than in gt and the total is within 5% of gt's, after two
// passes without improvement, or after cfg.max_iterations passes. Points that
// are not on the current network count as disconnected.
RoadResult road_refine(const BinaryMask& gt, const BinaryMask& broken,
                       LikelihoodProvider& provider, const RefineConfig& cfg,
                       const SampledPoints& pts);

}  // namespace netrefine
