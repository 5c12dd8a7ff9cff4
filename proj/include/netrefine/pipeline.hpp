#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "netrefine/completion.hpp"
#include "netrefine/raster.hpp"

namespace netrefine {

// Stand-in for the segmentation learner: maps the current ground truth and
// the iteration index to a per-pixel confidence raster. Implementations must
// be deterministic and return a raster of the ground truth's shape.
class LikelihoodProvider {
 public:
  virtual ~LikelihoodProvider() = default;
  virtual LikelihoodRaster produce(const BinaryMask& current_gt, int iteration) = 0;
};

// Reads `<dir>/iter_<i>.pfm`, e.g. likelihoods exported by an external model.
class FileLikelihoodProvider : public LikelihoodProvider {
 public:
  explicit FileLikelihoodProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  LikelihoodRaster produce(const BinaryMask& current_gt, int iteration) override;

  std::filesystem::path path_for(int iteration) const;

 private:
  std::filesystem::path dir_;
};

struct RefineConfig {
  int rho = 100;
  double tau = 0.5;
  // One value applies to every iteration; otherwise one value per iteration.
  std::vector<double> alpha{0.2, 0.2, 0.1, 0.01, 0.01};
  int max_iterations = 5;
  int dilation_kernel = 5;
  unsigned threads = 1;

  // Throws ParameterError on out-of-range values.
  void validate() const;
  double alpha_at(int iteration) const;
};

struct IterationStats {
  int iteration = 0;
  std::size_t reachable_px = 0;
  std::size_t unreachable_px = 0;
  std::size_t terminals = 0;
  std::size_t instances_solved = 0;
  std::size_t instances_unsolvable = 0;
  std::size_t pixels_added = 0;

  friend bool operator==(const IterationStats&, const IterationStats&) = default;
};

struct IterationResult {
  BinaryMask next_gt;
  IterationStats stats;
  std::vector<CompletionPath> paths;
};

struct RunResult {
  BinaryMask refined;
  std::vector<IterationStats> history;
  std::vector<CompletionPath> paths;
};

// thin(dilate(gt, k) | (w >= tau)) | gt
BinaryMask precompletion(const BinaryMask& current_gt, const LikelihoodRaster& w, double tau,
                         int dilation_kernel);

// Solves one completion instance per terminal against a shared weight raster.
// Sources are the `candidates` pixels within Euclidean rho of each terminal.
// Results are in terminal order; std::nullopt marks an unsolvable instance.
std::vector<std::optional<CompletionPath>> solve_terminals(std::span<const Terminal> terminals,
                                                           const BinaryMask& candidates,
                                                           const WeightRaster& weights, int rho,
                                                           unsigned threads);

// One refinement step: query the provider, build the pre-completion network,
// find the unreachable ground-truth pixels and their terminals, connect each
// terminal to a water edge or reachable pixel along the cheapest confident
// corridor, and add the winning paths to the ground truth.
IterationResult refine_iteration(const BinaryMask& current_gt, const BinaryMask& water,
                                 LikelihoodProvider& provider, const RefineConfig& cfg,
                                 int iteration);

// Repeats refine_iteration up to cfg.max_iterations times. Stops early once an
// iteration adds nothing, its terminal count matches the previous iteration's
// (or is zero on the first iteration) and the next alpha is unchanged.
RunResult run(const BinaryMask& gt, const BinaryMask& water, LikelihoodProvider& provider,
              const RefineConfig& cfg);

}  // namespace netrefine
