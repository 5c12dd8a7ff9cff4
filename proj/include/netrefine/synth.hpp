#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netrefine/pipeline.hpp"
#include "netrefine/raster.hpp"

namespace netrefine {

struct SynthConfig {
  GridShape shape{512, 512};
  std::uint64_t seed = 1;
  int trunk_count = 8;
  int branch_depth = 2;
  int water_blobs = 4;
  // Pixel budget of a trunk; each branch level gets half of its parent's.
  int trunk_length = 240;
  int branches_per_line = 3;
};

struct SynthNetwork {
  BinaryMask network;
  BinaryMask water;
};

// Random branching 1-px network whose trunks each start on the rim of a water
// blob. Separate polylines never come within a few pixels of each other or of
// the water, so every network pixel is reachable and the only water contact is
// at trunk roots. Throws ParameterError for infeasible configurations.
SynthNetwork generate_network(const SynthConfig& cfg);

struct RoadGridConfig {
  GridShape shape{512, 512};
  std::uint64_t seed = 1;
  int spacing = 64;
};

// Lattice of straight horizontal and vertical 1-px roads with jittered
// positions, closed by its outermost lines (no dangling ends).
BinaryMask generate_grid_roads(const RoadGridConfig& cfg);

struct GapSpec {
  int alpha = 0;                 // number of runs to remove
  std::vector<int> beta_choices;  // run lengths, drawn uniformly
  std::uint64_t seed = 1;
};

struct GapResult {
  BinaryMask broken;
  std::vector<std::vector<Pixel>> removed;  // one contiguous run per cut
  int shortfall = 0;                         // requested cuts that found no site
};

// Removes `alpha` contiguous runs from the network. Runs are cut only from
// chains of degree-2 pixels that are at least one pixel away from junctions
// and not touching water; each length is clipped to its chain. Draws are
// sequential, so the cuts for alpha = k are a prefix of those for alpha = k+1.
GapResult inject_gaps(const BinaryMask& network, const BinaryMask& water, const GapSpec& spec);

// Likelihood oracle that ignores the iteration: `hit` on the true network
// (dilated to width blur_kernel), 1 on background pixels drawn i.i.d. with
// probability false_rate, 0 elsewhere.
class OracleProvider : public LikelihoodProvider {
 public:
  OracleProvider(const BinaryMask& true_network, double hit, double false_rate, int blur_kernel,
                 std::uint64_t seed);

  LikelihoodRaster produce(const BinaryMask& current_gt, int iteration) override;
  const LikelihoodRaster& raster() const { return raster_; }

 private:
  LikelihoodRaster raster_;
};

}  // namespace netrefine
