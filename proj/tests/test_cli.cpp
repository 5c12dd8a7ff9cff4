#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "netrefine/raster_io.hpp"

namespace fs = std::filesystem;
using netrefine::BinaryMask;
using netrefine::GridShape;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = netrefine::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(NETREFINE_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

BinaryMask square_mask(int n) {
  BinaryMask m{GridShape(n, n)};
  for (int i = 0; i < n; ++i) m.set({i, i});
  return m;
}

}  // namespace

TEST_CASE("version and usage") {
  const Outcome v = call({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(netrefine::cli::kVersion) != std::string::npos);

  CHECK(call({}).code == 1);
  const Outcome missing = call({"metrics", "--gt", "x.pgm"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("--pred") != std::string::npos);
  CHECK(call({"frobnicate"}).code == 1);
}

TEST_CASE("metrics of a mask against itself") {
  const fs::path dir = scratch("metrics");
  netrefine::write_pgm(dir / "a.pgm", square_mask(8));
  const Outcome o = call({"metrics", "--pred", (dir / "a.pgm").string(), "--gt",
                          (dir / "a.pgm").string(), "--r", "0,2"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  for (const char* r : {"0", "2"}) {
    for (const char* k : {"precision", "recall", "f1", "iou"}) CHECK(j["r"][r][k] == 1.0);
  }
  CHECK(j["conventional"]["f1"] == 1.0);

  CHECK(call({"metrics", "--pred", (dir / "a.pgm").string(), "--gt", (dir / "a.pgm").string(),
              "--out", (dir / "m.json").string()})
            .code == 0);
  CHECK(read_json(dir / "m.json")["neighborhood"] == "square");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  netrefine::write_pgm(dir / "four.pgm", square_mask(4));
  netrefine::write_pgm(dir / "five.pgm", square_mask(5));

  const Outcome shape = call({"metrics", "--pred", (dir / "four.pgm").string(), "--gt",
                              (dir / "five.pgm").string()});
  CHECK(shape.code == 3);
  CHECK(shape.err.find("4x4") != std::string::npos);
  CHECK(shape.err.find("5x5") != std::string::npos);

  CHECK(call({"metrics", "--pred", (dir / "nope.pgm").string(), "--gt",
              (dir / "five.pgm").string()})
            .code == 2);

  std::ofstream(dir / "junk.pgm") << "P9 hello";
  CHECK(call({"analyze", "--network", (dir / "junk.pgm").string(), "--water",
              (dir / "five.pgm").string(), "--out", (dir / "r.json").string()})
            .code == 2);

  const Outcome bad_provider =
      call({"refine", "--gt", (dir / "five.pgm").string(), "--water", (dir / "five.pgm").string(),
            "--provider", "magic:x=1", "--out", (dir / "o.pgm").string()});
  CHECK(bad_provider.code == 1);

  CHECK(call({"refine", "--gt", (dir / "five.pgm").string(), "--water",
              (dir / "five.pgm").string(), "--out", (dir / "o.pgm").string()})
            .code == 1);
  CHECK(call({"refine", "--gt", (dir / "five.pgm").string(), "--water",
              (dir / "five.pgm").string(), "--provider", "oracle:truth=x", "--likelihood-dir",
              dir.string(), "--out", (dir / "o.pgm").string()})
            .code == 1);
  CHECK(call({"refine", "--gt", (dir / "five.pgm").string(), "--water",
              (dir / "five.pgm").string(), "--provider",
              "oracle:truth=" + (dir / "five.pgm").string(), "--alpha", "0.1,0.2", "--out",
              (dir / "o.pgm").string()})
            .code == 1);
}

TEST_CASE("analyze report") {
  const fs::path dir = scratch("analyze");
  BinaryMask net{GridShape(5, 12)}, water{GridShape(5, 12)};
  water.set({2, 0});
  for (int c = 1; c <= 4; ++c) net.set({2, c});
  for (int c = 7; c <= 10; ++c) net.set({2, c});
  netrefine::write_pgm(dir / "net.pgm", net);
  netrefine::write_pgm(dir / "water.pgm", water);
  REQUIRE(call({"analyze", "--network", (dir / "net.pgm").string(), "--water",
                (dir / "water.pgm").string(), "--out", (dir / "r.json").string()})
              .code == 0);
  const auto j = read_json(dir / "r.json");
  CHECK(j["network_px"] == 8);
  CHECK(j["reachable"] == 4);
  CHECK(j["unreachable"] == 4);
  CHECK(j["directly_connected"] == 1);
  CHECK(j["unreachable_fraction"] == 0.5);
  CHECK(j["terminals"] == 2);
}

TEST_CASE("synth, refine and roadgap are reproducible") {
  const fs::path dir = scratch("repro");
  for (const char* run : {"a", "b"}) {
    const fs::path d = dir / run;
    const std::vector<std::string> synth{"synth",    "--seed",  "3",  "--rows",    "256",
                                         "--cols",   "256",     "--trunks", "4",   "--gaps",
                                         "8",        "--beta",  "10,20", "--out-dir", (d / "canal").string(),
                                         "--manifest", (d / "synth_manifest.json").string()};
    REQUIRE(call(synth).code == 0);
    const fs::path canal = d / "canal";
    REQUIRE(call({"refine", "--gt", (canal / "broken.pgm").string(), "--water",
                  (canal / "water.pgm").string(), "--provider",
                  "oracle:truth=" + (canal / "network.pgm").string(), "--out",
                  (d / "refined.pgm").string(), "--stats", (d / "stats.json").string(),
                  "--dump-paths", (d / "paths.json").string(), "--threads", "3", "--manifest",
                  (d / "refine_manifest.json").string()})
                .code == 0);

    REQUIRE(call({"synth", "--kind", "grid", "--seed", "5", "--rows", "256", "--cols", "256",
                  "--out-dir", (d / "grid").string()})
                .code == 0);
    REQUIRE(call({"roadgap", "--gt", (d / "grid" / "network.pgm").string(), "--seed", "5",
                  "--gaps", "6", "--beta", "20,30", "--points", "20", "--alpha", "0.2",
                  "--out-dir", (d / "road").string()})
                .code == 0);
  }

  for (const char* f : {"canal/network.pgm", "canal/water.pgm", "canal/broken.pgm",
                        "canal/removed.json", "refined.pgm", "stats.json", "paths.json",
                        "grid/network.pgm", "road/broken.pgm", "road/refined.pgm",
                        "road/trace.json", "road/comparison.json"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK_FALSE(slurp(dir / "a" / f).empty());
  }

  const auto stats = read_json(dir / "a" / "stats.json");
  REQUIRE(stats.is_array());
  REQUIRE_FALSE(stats.empty());
  CHECK(stats[0].contains("unreachable_px"));

  const auto removed = read_json(dir / "a" / "canal" / "removed.json");
  CHECK(removed["segments"].size() + removed["shortfall"].get<std::size_t>() == 8);

  const auto cmp = read_json(dir / "a" / "road" / "comparison.json");
  CHECK(cmp["ratio"].get<double>() > 0.0);

  const auto m = read_json(dir / "a" / "refine_manifest.json");
  CHECK(m["subcommand"] == "refine");
  CHECK(m["tool_version"] == netrefine::cli::kVersion);
  CHECK(m["parameters"]["--threads"] == "3");
  CHECK(m["inputs"].size() == 3);
  for (const auto& [path, digest] : m["inputs"].items()) CHECK(digest.get<std::string>().size() == 64);
  CHECK(m.contains("duration_s"));
  CHECK(m.contains("timestamp"));
  const auto sm = read_json(dir / "a" / "synth_manifest.json");
  CHECK(sm["parameters"]["--gap-seed"] == "3");
}
