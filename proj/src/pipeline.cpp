#include "netrefine/pipeline.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "netrefine/error.hpp"
#include "netrefine/morphology.hpp"
#include "netrefine/raster_io.hpp"
#include "netrefine/reachability.hpp"
#include "parallel.hpp"

namespace netrefine {

std::filesystem::path FileLikelihoodProvider::path_for(int iteration) const {
  return dir_ / ("iter_" + std::to_string(iteration) + ".pfm");
}

LikelihoodRaster FileLikelihoodProvider::produce(const BinaryMask& current_gt, int iteration) {
  const auto path = path_for(iteration);
  PfmImage image = read_pfm(path);
  if (image.clamped > 0) {
    std::cerr << "warning: " << path.string() << ": clamped " << image.clamped
              << " samples into [0, 1]\n";
  }
  require_same_shape(image.raster.shape(), current_gt.shape(), path.string().c_str());
  return std::move(image.raster);
}

void RefineConfig::validate() const {
  if (rho < 1) throw ParameterError("rho must be a positive integer");
  if (!(tau > 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in (0, 1]");
  if (max_iterations < 1) throw ParameterError("max_iterations must be positive");
  if (dilation_kernel < 1 || dilation_kernel % 2 == 0) {
    throw ParameterError("dilation kernel must be odd and positive");
  }
  if (alpha.empty()) throw ParameterError("alpha schedule is empty");
  if (alpha.size() != 1 && alpha.size() != static_cast<std::size_t>(max_iterations)) {
    throw ParameterError("alpha schedule has " + std::to_string(alpha.size()) +
                         " entries for " + std::to_string(max_iterations) + " iterations");
  }
  for (double a : alpha) {
    if (!(a >= 0.0 && a < 1.0)) throw ParameterError("alpha values must lie in [0, 1)");
  }
}

double RefineConfig::alpha_at(int iteration) const {
  if (alpha.size() == 1) return alpha.front();
  const auto i = static_cast<std::size_t>(std::max(0, iteration));
  return alpha[std::min(i, alpha.size() - 1)];
}

BinaryMask precompletion(const BinaryMask& current_gt, const LikelihoodRaster& w, double tau,
                         int dilation_kernel) {
  require_same_shape(current_gt.shape(), w.shape(), "precompletion");
  BinaryMask merged = unite(dilate(current_gt, dilation_kernel), threshold(w, tau));
  return unite(thin(merged), current_gt);
}

std::vector<std::optional<CompletionPath>> solve_terminals(std::span<const Terminal> terminals,
                                                           const BinaryMask& candidates,
                                                           const WeightRaster& weights, int rho,
                                                           unsigned threads) {
  std::vector<std::optional<CompletionPath>> out(terminals.size());
  detail::parallel_for(terminals.size(), threads, [&](std::size_t i) {
    const Terminal& t = terminals[i];
    auto sources = pair_sources(t, candidates, static_cast<double>(rho));
    if (sources.empty()) return;
    CompletionInstance instance{t, std::move(sources), build_local_graph(weights, t, rho)};
    out[i] = solve_instance(instance);
  });
  return out;
}

IterationResult refine_iteration(const BinaryMask& current_gt, const BinaryMask& water,
                                 LikelihoodProvider& provider, const RefineConfig& cfg,
                                 int iteration) {
  cfg.validate();
  require_same_shape(current_gt.shape(), water.shape(), "refine_iteration");

  LikelihoodRaster w(current_gt.shape());
  try {
    w = provider.produce(current_gt, iteration);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ProviderError("likelihood provider failed at iteration " +
                        std::to_string(iteration) + ": " + e.what());
  }
  require_same_shape(w.shape(), current_gt.shape(), "likelihood provider output");

  const BinaryMask hc = precompletion(current_gt, w, cfg.tau, cfg.dilation_kernel);

  // Reachability is judged on the ground truth itself: the pre-completion
  // network already bridges every gap the provider is confident about, so
  // partitioning it would hide exactly the gaps the labels still need.
  const ReachabilityPartition part = partition(current_gt, water, current_gt);
  const auto terminals = detect_terminals(part.unreachable);
  const BinaryMask candidates = unite(water_edge_points(water), part.reachable);
  const WeightRaster weights =
      build_weight_raster(terminals, w, hc, cfg.rho, cfg.alpha_at(iteration));

  auto solved = solve_terminals(terminals, candidates, weights, cfg.rho, cfg.threads);

  IterationResult result{current_gt, {}, {}};
  for (auto& path : solved) {
    if (path) result.paths.push_back(std::move(*path));
  }
  StampResult stamped = stamp_paths(current_gt, result.paths);
  result.next_gt = std::move(stamped.network);

  IterationStats& s = result.stats;
  s.iteration = iteration;
  s.reachable_px = part.reachable_count();
  s.unreachable_px = part.unreachable_count();
  s.terminals = terminals.size();
  s.instances_solved = result.paths.size();
  s.instances_unsolvable = terminals.size() - result.paths.size();
  s.pixels_added = stamped.pixels_added;
  return result;
}

RunResult run(const BinaryMask& gt, const BinaryMask& water, LikelihoodProvider& provider,
              const RefineConfig& cfg) {
  cfg.validate();
  RunResult result{gt, {}, {}};
  for (int i = 0; i < cfg.max_iterations; ++i) {
    IterationResult step = refine_iteration(result.refined, water, provider, cfg, i);
    result.refined = std::move(step.next_gt);
    for (auto& p : step.paths) result.paths.push_back(std::move(p));
    result.history.push_back(step.stats);

    const IterationStats& s = step.stats;
    const std::size_t previous_terminals =
        result.history.size() >= 2 ? result.history[result.history.size() - 2].terminals : 0;
    const bool stalled = s.pixels_added == 0 && s.terminals == previous_terminals;
    if (stalled && cfg.alpha_at(i + 1) == cfg.alpha_at(i)) break;
  }
  return result;
}

}  // namespace netrefine
