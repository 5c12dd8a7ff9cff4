// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netrefine/completion.hpp"
#include "netrefine/metrics.hpp"
#include "netrefine/morphology.hpp"
#include "netrefine/pipeline.hpp"
#include "netrefine/raster_io.hpp"
#include "netrefine/reachability.hpp"
#include "netrefine/roadnet.hpp"
#include "netrefine/synth.hpp"
#include "oracles.hpp"

using namespace netrefine;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  if (!v.ok) ++failures;
  std::printf("[%s] %d %s: %s\n", v.ok ? "PASS" : "FAIL", id, name, v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Shared by criteria 1 and 5.
struct CanalRun {
  std::uint64_t seed = 0;
  int gaps = 0;
  double before = 0, after = 0, seconds = 0;
  RunResult result;
};

CanalRun canal_run() {
  const std::vector<int> betas{10, 20, 30, 50};  // all at most rho / 2
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    const SynthNetwork net = generate_network(sc);
    for (int gaps = 1; gaps <= 60; ++gaps) {
      const GapResult g = inject_gaps(net.network, net.water, {gaps, betas, seed * 100 + gaps});
      const double before = partition(g.broken, net.water, g.broken).unreachable_fraction();
      if (before > 0.18) break;
      if (before < 0.15) continue;

      OracleProvider oracle(net.network, 1.0, 0.0, 1, seed);
      RefineConfig cfg;
      cfg.rho = 100;
      cfg.tau = 0.5;
      cfg.alpha = {0.2};
      cfg.max_iterations = 5;
      cfg.threads = 1;
      const auto t0 = Clock::now();
      RunResult r = run(g.broken, net.water, oracle, cfg);
      const double secs = seconds_since(t0);
      const double after = partition(r.refined, net.water, r.refined).unreachable_fraction();
      return {seed, gaps, before, after, secs, std::move(r)};
    }
  }
  throw std::runtime_error("no seed gives a 15-18% unreachable fraction");
}

Verdict criterion_1(const CanalRun& c) {
  const bool ok = c.after <= 0.03 && c.result.history.size() <= 5 && c.seconds < 10.0;
  return {ok, "seed " + std::to_string(c.seed) + ", " + std::to_string(c.gaps) + " gaps, " +
                  fmt("unreachable %.3f -> %.4f in %.0f iterations, %.2f s", c.before, c.after,
                      static_cast<double>(c.result.history.size()), c.seconds)};
}

Verdict criterion_2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> weight(0, 9), coord(0, 11), nsrc(1, 5);
  int matched = 0, solvable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const GridShape s(12, 12);
    std::vector<std::uint32_t> w(s.size());
    for (auto& v : w) v = static_cast<std::uint32_t>(weight(rng));
    const Pixel t{coord(rng), coord(rng)};
    if (w[s.index(t)] == 0) w[s.index(t)] = 1;
    std::vector<Pixel> sources;
    for (int k = nsrc(rng); k > 0; --k) sources.push_back({coord(rng), coord(rng)});

    WeightRaster x(s);
    for (std::size_t i = 0; i < w.size(); ++i) x.set(s.pixel(i), w[i]);
    const auto got =
        solve_instance({Terminal{t}, sources, build_local_graph(x, Terminal{t}, 12)});
    const auto want = oracle::node_weighted_cost(w, 12, 12, t, sources);
    if (want) ++solvable;
    if (got.has_value() == want.has_value() && (!got || got->cost == *want)) ++matched;
  }
  const double secs = seconds_since(t0);
  return {matched == 50 && secs < 1.0,
          fmt("%.0f/50 exact (%.0f solvable), %.3f s", matched, solvable, secs)};
}

Verdict criterion_3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3003);
  int matched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridShape s(64, 64);
    const BinaryMask net = oracle::random_mask(s, 0.35, rng);
    const BinaryMask water = oracle::random_mask(s, 0.01, rng);
    const BinaryMask c = directly_connected(net, water);
    const auto expected_c = oracle::directly_connected(net, water);
    const BinaryMask r = reachable_closure(net, c);
    if (oracle::as_set(c) == expected_c && oracle::as_set(r) == oracle::flood_fill(net, expected_c))
      ++matched;
  }
  const double secs = seconds_since(t0);
  return {matched == 100 && secs < 1.0, fmt("%.0f/100 exact, %.3f s", matched, secs)};
}

Verdict criterion_4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4004);
  int zero_ok = 0, sum_ok = 0, sum_total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridShape s(64, 64);
    const BinaryMask pred = oracle::random_mask(s, 0.08, rng);
    const BinaryMask gt = oracle::random_mask(s, 0.08, rng);
    if (scores(r_confusion(pred, gt, 0)) == conventional_scores(pred, gt)) ++zero_ok;
    for (int r : {1, 2, 5}) {
      const RConfusion got = r_confusion(pred, gt, r);
      const oracle::Counts want = oracle::r_counts(pred, gt, r, false);
      ++sum_total;
      if (got.rtp == want.rtp && got.rfp == want.rfp && got.rfn == want.rfn) ++sum_ok;
    }
  }
  const double secs = seconds_since(t0);
  return {zero_ok == 100 && sum_ok == sum_total && secs < 2.0,
          fmt("r=0 %.0f/100, double sum %.0f/%.0f, %.3f s", zero_ok, sum_ok, sum_total, secs)};
}

Verdict criterion_5(const CanalRun& c) {
  const auto& h = c.result.history;
  bool ok = !h.empty();
  std::string trend;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i > 0) {
      ok = ok && h[i].reachable_px >= h[i - 1].reachable_px &&
           h[i].unreachable_px <= h[i - 1].unreachable_px && h[i].terminals <= h[i - 1].terminals;
    }
    trend += (i ? " | " : "") + std::to_string(h[i].reachable_px) + "/" +
             std::to_string(h[i].unreachable_px) + "/" + std::to_string(h[i].terminals);
  }
  return {ok, "reachable/unreachable/terminals " + trend};
}

Verdict criterion_6() {
  const auto t0 = Clock::now();
  const BinaryMask roads = generate_grid_roads({GridShape(512, 512), 6, 64});
  const GapResult g = inject_gaps(roads, BinaryMask(roads.shape()), {20, {20, 30, 50}, 66});
  const SampledPoints pts = sample_points(roads, 50, 6);
  OracleProvider oracle(roads, 1.0, 0.0, 1, 6);
  RefineConfig cfg;
  cfg.alpha = {0.2};
  const RoadResult r = road_refine(roads, g.broken, oracle, cfg, pts);
  const CommonTotals common = common_totals(r.reference, r.final);
  const double ratio = static_cast<double>(common.second) / static_cast<double>(common.first);
  const int passes = static_cast<int>(r.trace.size()) - 1;
  const double secs = seconds_since(t0);
  const bool ok = passes <= 3 && ratio <= 1.05 && ratio >= 0.95 &&
                  r.final.disconnected_pairs <= r.reference.disconnected_pairs && secs < 30.0;
  return {ok, fmt("broken had %.0f disconnected pairs; %.0f passes, ratio %.4f, %.2f s",
                  static_cast<double>(r.trace.front().disconnected), passes, ratio, secs)};
}

Verdict criterion_7() {
  std::mt19937_64 rng(7007);
  std::uniform_int_distribution<int> trunks(1, 6), depth(0, 2), gaps(0, 12);
  int ok = 0;
  for (int k = 0; k < 20; ++k) {
    SynthConfig sc;
    sc.shape = GridShape(256, 256);
    sc.seed = 500 + static_cast<std::uint64_t>(k);
    sc.trunk_count = trunks(rng);
    sc.branch_depth = depth(rng);
    sc.water_blobs = 2;
    sc.trunk_length = 120;
    const SynthNetwork net = generate_network(sc);
    OracleProvider noisy(net.network, 0.9, 0.002, 1, sc.seed);
    RefineConfig cfg;
    cfg.rho = 60;

    const RunResult same = run(net.network, net.water, noisy, cfg);
    bool fixed = same.refined == net.network;
    for (const auto& st : same.history) fixed = fixed && st.pixels_added == 0;

    const GapResult g = inject_gaps(net.network, net.water, {gaps(rng), {10, 20, 30}, sc.seed});
    const RunResult r = run(g.broken, net.water, noisy, cfg);
    if (fixed && is_subset(g.broken, r.refined)) ++ok;
  }
  return {ok == 20, fmt("%.0f/20 configurations", ok)};
}

Verdict criterion_8() {
  const fs::path dir = fs::temp_directory_path() / "netrefine_acceptance";
  fs::create_directories(dir);
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<int> side(1, 40);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  int ok = 0;
  for (int k = 0; k < 20; ++k) {
    GridShape s(side(rng), side(rng));
    if (k == 0) s = GridShape(1, 1);
    if (k == 1) s = GridShape(1, 37);
    if (k == 2) s = GridShape(29, 1);
    const BinaryMask m = oracle::random_mask(s, 0.3, rng);
    std::vector<float> v(s.size());
    for (auto& x : v) x = u(rng);
    const LikelihoodRaster w(s, std::move(v));

    write_pgm(dir / "m.pgm", m);
    write_pfm(dir / "w.pfm", w);
    const PfmImage back = read_pfm(dir / "w.pfm");
    if (read_pgm(dir / "m.pgm") == m && back.raster == w && back.clamped == 0) ++ok;
  }
  fs::remove_all(dir);
  return {ok == 20, fmt("%.0f/20 rasters", ok)};
}

}  // namespace

int main() {
  std::optional<CanalRun> canal;
  report(1, "unreachable fraction after refinement", [&] {
    canal = canal_run();
    return criterion_1(*canal);
  });
  report(2, "node-split dijkstra vs direct oracle", criterion_2);
  report(3, "reachability vs naive oracles", criterion_3);
  report(4, "r-metrics at r=0 and double sum", criterion_4);
  report(5, "per-iteration trends", [&] {
    return canal ? criterion_5(*canal) : Verdict{false, "criterion 1 did not run"};
  });
  report(6, "road distances after repair", criterion_6);
  report(7, "fixed point and superset", criterion_7);
  report(8, "pgm and pfm round trips", criterion_8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
