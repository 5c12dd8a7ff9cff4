#include "netrefine/roadnet.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "netrefine/completion.hpp"
#include "netrefine/error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace netrefine {

SampledPoints sample_points(const BinaryMask& network, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ParameterError("at least two points must be sampled");
  std::vector<Pixel> pool = to_pixels(network);
  if (pool.size() < n) {
    throw InputError("cannot sample " + std::to_string(n) + " points from a network of " +
                     std::to_string(pool.size()) + " pixels");
  }
  detail::Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return {std::move(pool), seed};
}

namespace {

// Hop distances from `from` to every pixel, -1 where unreachable.
std::vector<std::int64_t> bfs_hops(const BinaryMask& network, Pixel from) {
  const GridShape& shape = network.shape();
  std::vector<std::int64_t> dist(shape.size(), -1);
  std::deque<Pixel> queue{from};
  dist[shape.index(from)] = 0;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    const std::int64_t next = dist[shape.index(p)] + 1;
    for (auto [dr, dc] : kMooreOffsets) {
      const Pixel q{p.row + dr, p.col + dc};
      if (!network.test_or_zero(q.row, q.col)) continue;
      auto& d = dist[shape.index(q)];
      if (d < 0) {
        d = next;
        queue.push_back(q);
      }
    }
  }
  return dist;
}

// Like apsp, but points off the network are simply disconnected from all
// others.
DistanceSummary summarize(const BinaryMask& network, const SampledPoints& pts, unsigned threads) {
  const std::size_t n = pts.points.size();
  DistanceSummary s;
  s.n = n;
  s.distances.assign(n * n, std::nullopt);
  detail::parallel_for(n, threads, [&](std::size_t i) {
    const Pixel p = pts.points[i];
    if (!network.shape().contains(p) || !network.test(p)) return;
    const auto dist = bfs_hops(network, p);
    for (std::size_t j = 0; j < n; ++j) {
      const Pixel q = pts.points[j];
      if (!network.shape().contains(q)) continue;
      const std::int64_t d = dist[network.shape().index(q)];
      if (d >= 0) s.distances[i * n + j] = static_cast<std::uint64_t>(d);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (const auto& d = s.at(i, j)) {
        s.total += *d;
      } else {
        ++s.disconnected_pairs;
      }
    }
  }
  return s;
}

// Network pixels within rho of t that the current network does not already
// link to t along a short route.
std::vector<Pixel> detour_sources(const BinaryMask& network, Pixel t, int rho) {
  constexpr double kDetourFactor = 2.0;
  const int reach = 2 * rho;
  const int side = 2 * reach + 1;
  const Pixel origin{t.row - reach, t.col - reach};
  std::vector<std::int32_t> hops(static_cast<std::size_t>(side) * side, -1);
  auto cell = [&](Pixel p) {
    return static_cast<std::size_t>(p.row - origin.row) * side + (p.col - origin.col);
  };
  std::deque<Pixel> queue{t};
  hops[cell(t)] = 0;
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    const std::int32_t next = hops[cell(p)] + 1;
    if (next > reach) continue;
    for (auto [dr, dc] : kMooreOffsets) {
      const Pixel q{p.row + dr, p.col + dc};
      if (!network.test_or_zero(q.row, q.col)) continue;
      auto& h = hops[cell(q)];
      if (h < 0) {
        h = next;
        queue.push_back(q);
      }
    }
  }

  std::vector<Pixel> out;
  for (Pixel s : pair_sources(Terminal{t}, network, static_cast<double>(rho))) {
    if (s == t) continue;
    const std::int32_t h = hops[cell(s)];
    const double straight = std::hypot(s.row - t.row, s.col - t.col);
    if (h < 0 || h > kDetourFactor * straight) out.push_back(s);
  }
  return out;
}

BinaryMask road_pass(const BinaryMask& current, LikelihoodProvider& provider,
                     const RefineConfig& cfg, int iteration) {
  LikelihoodRaster w(current.shape());
  try {
    w = provider.produce(current, iteration);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ProviderError("likelihood provider failed at iteration " + std::to_string(iteration) +
                        ": " + e.what());
  }
  require_same_shape(w.shape(), current.shape(), "likelihood provider output");

  const BinaryMask hc = precompletion(current, w, cfg.tau, cfg.dilation_kernel);
  const auto terminals = detect_terminals(current);
  const WeightRaster weights =
      build_weight_raster(terminals, w, hc, cfg.rho, cfg.alpha_at(iteration));

  std::vector<std::optional<CompletionPath>> solved(terminals.size());
  detail::parallel_for(terminals.size(), cfg.threads, [&](std::size_t i) {
    const Terminal& t = terminals[i];
    auto sources = detour_sources(current, t.at, cfg.rho);
    if (sources.empty()) return;
    CompletionInstance instance{t, std::move(sources), build_local_graph(weights, t, cfg.rho)};
    solved[i] = solve_instance(instance);
  });

  std::vector<CompletionPath> paths;
  for (auto& p : solved) {
    if (p) paths.push_back(std::move(*p));
  }
  return stamp_paths(current, paths).network;
}

}  // namespace

DistanceSummary apsp(const BinaryMask& network, const SampledPoints& pts, unsigned threads) {
  for (Pixel p : pts.points) {
    if (!network.shape().contains(p) || !network.test(p)) {
      throw InputError("sampled point " + std::to_string(p.row) + "," + std::to_string(p.col) +
                       " is not a network pixel");
    }
  }
  return summarize(network, pts, threads);
}

CommonTotals common_totals(const DistanceSummary& a, const DistanceSummary& b) {
  if (a.n != b.n) throw ParameterError("distance summaries cover different point sets");
  CommonTotals out;
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = i + 1; j < a.n; ++j) {
      const auto& da = a.at(i, j);
      const auto& db = b.at(i, j);
      if (!da || !db) continue;
      out.first += *da;
      out.second += *db;
      ++out.pairs;
    }
  }
  return out;
}

RoadResult road_refine(const BinaryMask& gt, const BinaryMask& broken,
                       LikelihoodProvider& provider, const RefineConfig& cfg,
                       const SampledPoints& pts) {
  cfg.validate();
  require_same_shape(gt.shape(), broken.shape(), "road_refine");
  if (!is_subset(broken, gt)) throw InputError("broken network is not a subset of the ground truth");

  RoadResult result{broken, {}, apsp(gt, pts, cfg.threads), {}};
  const DistanceSummary& ref = result.reference;
  auto converged = [&](const DistanceSummary& s) {
    return s.disconnected_pairs <= ref.disconnected_pairs &&
           static_cast<double>(s.total) <= 1.05 * static_cast<double>(ref.total);
  };

  DistanceSummary current = summarize(broken, pts, cfg.threads);
  result.trace.push_back({0, current.total, current.disconnected_pairs});
  int stale = 0;
  for (int i = 0; i < cfg.max_iterations && !converged(current) && stale < 2; ++i) {
    result.refined = road_pass(result.refined, provider, cfg, i);
    DistanceSummary next = summarize(result.refined, pts, cfg.threads);
    const bool improved = next.disconnected_pairs < current.disconnected_pairs ||
                          (next.disconnected_pairs == current.disconnected_pairs &&
                           next.total < current.total);
    stale = improved ? 0 : stale + 1;
    current = std::move(next);
    result.trace.push_back({i + 1, current.total, current.disconnected_pairs});
  }
  result.final = std::move(current);
  return result;
}

}  // namespace netrefine
