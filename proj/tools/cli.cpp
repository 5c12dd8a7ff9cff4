#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "netrefine/completion.hpp"
#include "netrefine/error.hpp"
#include "netrefine/metrics.hpp"
#include "netrefine/pipeline.hpp"
#include "netrefine/raster_io.hpp"
#include "netrefine/reachability.hpp"
#include "netrefine/roadnet.hpp"
#include "netrefine/synth.hpp"

namespace netrefine::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Options {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string manifest;

  // shared between subcommands
  std::string network, water, gt, pred, out, out_dir, stats, dump_paths;
  std::string likelihood_dir, provider;
  std::string neighborhood = "square";
  std::vector<int> radii{0};
  int rho = 100;
  double tau = 0.5;
  std::vector<double> alpha{0.2, 0.2, 0.1, 0.01, 0.01};
  int iters = 5;
  int kernel = 5;

  std::string kind = "canal";
  std::uint64_t seed = 0;
  std::uint64_t gap_seed = 0;
  int rows = 512, cols = 512;
  int trunks = 8, depth = 2, blobs = 4, trunk_length = 240, branches = 3, spacing = 64;
  int gaps = 0;
  std::vector<int> beta{20, 30, 50, 100};
  std::size_t points = 50;
};

// Paths of every file read, for the manifest.
struct Context {
  std::vector<fs::path> inputs;

  BinaryMask mask(const std::string& path) {
    inputs.emplace_back(path);
    return read_pgm(fs::path(path));
  }
};

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("write failed: " + path.string());
}

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json resolved_parameters(const CLI::App& app) {
  Json params = Json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help" || name == "--version") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    params[name] = value;
  }
  return params;
}

Json iteration_json(const IterationStats& s) {
  return {{"iteration", s.iteration},
          {"reachable_px", s.reachable_px},
          {"unreachable_px", s.unreachable_px},
          {"terminals", s.terminals},
          {"instances_solved", s.instances_solved},
          {"instances_unsolvable", s.instances_unsolvable},
          {"pixels_added", s.pixels_added}};
}

Json scores_json(const ScoreSet& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"iou", s.iou}};
}

Json pixels_json(std::span<const Pixel> pixels) {
  Json arr = Json::array();
  for (Pixel p : pixels) arr.push_back({p.row, p.col});
  return arr;
}

RefineConfig refine_config(const Options& o) {
  RefineConfig cfg;
  cfg.rho = o.rho;
  cfg.tau = o.tau;
  cfg.alpha = o.alpha;
  cfg.max_iterations = o.iters;
  cfg.dilation_kernel = o.kernel;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

// "oracle:truth=PATH,hit=1,false_rate=0,blur=1,seed=1"
std::unique_ptr<LikelihoodProvider> parse_provider(const std::string& spec, Context& ctx) {
  const std::string prefix = "oracle:";
  if (spec.rfind(prefix, 0) != 0) {
    throw ParameterError("unknown provider '" + spec + "' (expected oracle:truth=PATH,...)");
  }
  std::string truth;
  double hit = 1.0, false_rate = 0.0;
  int blur = 1;
  std::uint64_t seed = 1;
  std::stringstream fields(spec.substr(prefix.size()));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParameterError("provider field '" + field + "' lacks '='");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      if (key == "truth") {
        truth = value;
      } else if (key == "hit") {
        hit = std::stod(value);
      } else if (key == "false_rate") {
        false_rate = std::stod(value);
      } else if (key == "blur") {
        blur = std::stoi(value);
      } else if (key == "seed") {
        seed = std::stoull(value);
      } else {
        throw ParameterError("unknown provider field '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ParameterError("bad value for provider field '" + key + "': " + value);
    }
  }
  if (truth.empty()) throw ParameterError("oracle provider needs truth=PATH");
  return std::make_unique<OracleProvider>(ctx.mask(truth), hit, false_rate, blur, seed);
}

Neighborhood neighborhood_of(const std::string& name) {
  return name == "disk" ? Neighborhood::kDisk : Neighborhood::kSquare;
}

int run_analyze(const Options& o, Context& ctx, std::ostream&) {
  const BinaryMask network = ctx.mask(o.network);
  const BinaryMask water = ctx.mask(o.water);
  const BinaryMask gt = o.gt.empty() ? network : ctx.mask(o.gt);
  const ReachabilityPartition part = partition(network, water, gt);
  const Json report = {{"rows", network.rows()},
                       {"cols", network.cols()},
                       {"network_px", count_ones(network)},
                       {"reachable", part.reachable_count()},
                       {"unreachable", part.unreachable_count()},
                       {"directly_connected", count_ones(part.directly_connected)},
                       {"unreachable_fraction", part.unreachable_fraction()},
                       {"terminals", detect_terminals(part.unreachable).size()}};
  write_json(o.out, report);
  return kOk;
}

int run_metrics(const Options& o, Context& ctx, std::ostream& out) {
  const BinaryMask pred = ctx.mask(o.pred);
  const BinaryMask gt = ctx.mask(o.gt);
  require_same_shape(pred.shape(), gt.shape(), "metrics pred vs gt");
  Json report = Json::object();
  Json by_radius = Json::object();
  for (int r : o.radii) {
    if (r < 0) throw ParameterError("radius must be non-negative");
    const RConfusion c = r_confusion(pred, gt, r, neighborhood_of(o.neighborhood));
    Json entry = {{"rtp", c.rtp}, {"rfp", c.rfp}, {"rfn", c.rfn}};
    entry.update(scores_json(scores(c)));
    by_radius[std::to_string(r)] = entry;
  }
  report["neighborhood"] = o.neighborhood;
  report["r"] = by_radius;
  report["conventional"] = scores_json(conventional_scores(pred, gt));
  if (o.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    write_json(o.out, report);
  }
  return kOk;
}

int run_refine(const Options& o, Context& ctx, std::ostream&) {
  const RefineConfig cfg = refine_config(o);
  const BinaryMask gt = ctx.mask(o.gt);
  const BinaryMask water = ctx.mask(o.water);
  std::unique_ptr<LikelihoodProvider> provider;
  if (!o.likelihood_dir.empty()) {
    provider = std::make_unique<FileLikelihoodProvider>(o.likelihood_dir);
  } else {
    provider = parse_provider(o.provider, ctx);
  }

  const RunResult result = run(gt, water, *provider, cfg);
  write_pgm(fs::path(o.out), result.refined);

  if (!o.stats.empty()) {
    Json history = Json::array();
    for (const auto& s : result.history) history.push_back(iteration_json(s));
    write_json(o.stats, history);
  }
  if (!o.dump_paths.empty()) {
    Json paths = Json::array();
    for (const auto& p : result.paths) {
      paths.push_back({{"cost", p.cost}, {"pixels", pixels_json(p.pixels)}});
    }
    write_json(o.dump_paths, paths);
  }
  return kOk;
}

int run_synth(const Options& o, Context&, std::ostream&) {
  const GridShape shape(o.rows, o.cols);
  BinaryMask network(shape), water(shape);
  if (o.kind == "grid") {
    network = generate_grid_roads({shape, o.seed, o.spacing});
  } else {
    SynthConfig cfg{shape, o.seed, o.trunks, o.depth, o.blobs, o.trunk_length, o.branches};
    SynthNetwork net = generate_network(cfg);
    network = std::move(net.network);
    water = std::move(net.water);
  }
  const GapResult gaps = inject_gaps(network, water, {o.gaps, o.beta, o.gap_seed});

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_pgm(dir / "network.pgm", network);
  write_pgm(dir / "water.pgm", water);
  write_pgm(dir / "broken.pgm", gaps.broken);
  Json segments = Json::array();
  for (const auto& seg : gaps.removed) segments.push_back(pixels_json(seg));
  write_json(dir / "removed.json", {{"shortfall", gaps.shortfall}, {"segments", segments}});
  return kOk;
}

int run_roadgap(const Options& o, Context& ctx, std::ostream&) {
  const RefineConfig cfg = refine_config(o);
  const BinaryMask gt = ctx.mask(o.gt);
  const BinaryMask no_water(gt.shape());
  const GapResult gaps = inject_gaps(gt, no_water, {o.gaps, o.beta, o.gap_seed});
  const SampledPoints pts = sample_points(gt, o.points, o.seed);

  std::unique_ptr<LikelihoodProvider> provider;
  if (!o.likelihood_dir.empty()) {
    provider = std::make_unique<FileLikelihoodProvider>(o.likelihood_dir);
  } else if (!o.provider.empty()) {
    provider = parse_provider(o.provider, ctx);
  } else {
    provider = std::make_unique<OracleProvider>(gt, 1.0, 0.0, 1, o.seed);
  }
  const RoadResult result = road_refine(gt, gaps.broken, *provider, cfg, pts);

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  write_pgm(dir / "broken.pgm", gaps.broken);
  write_pgm(dir / "refined.pgm", result.refined);
  Json trace = Json::array();
  for (const auto& e : result.trace) {
    trace.push_back({{"iteration", e.iteration}, {"total", e.total}, {"disconnected", e.disconnected}});
  }
  write_json(dir / "trace.json", trace);
  const CommonTotals common = common_totals(result.reference, result.final);
  const double ratio = common.first == 0 ? 1.0
                                         : static_cast<double>(common.second) /
                                               static_cast<double>(common.first);
  write_json(dir / "comparison.json", {{"gt_total", common.first},
                                       {"final_total", common.second},
                                       {"ratio", ratio},
                                       {"common_pairs", common.pairs},
                                       {"gt_disconnected", result.reference.disconnected_pairs},
                                       {"final_disconnected", result.final.disconnected_pairs},
                                       {"gap_shortfall", gaps.shortfall}});
  return kOk;
}

void add_refine_knobs(CLI::App* sub, Options& o) {
  sub->add_option("--rho", o.rho, "search radius in pixels");
  sub->add_option("--tau", o.tau, "likelihood threshold of the pre-completion network");
  sub->add_option("--alpha", o.alpha, "confidence floor, one value or one per iteration")
      ->delimiter(',');
  sub->add_option("--iters", o.iters, "maximum number of iterations");
  sub->add_option("--kernel", o.kernel, "dilation kernel of the pre-completion network");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Ground-truth refinement for raster infrastructure networks", "netrefine"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--manifest", o.manifest, "write a JSON run manifest to this path");

  auto* analyze = app.add_subcommand("analyze", "reachability report of a network");
  analyze->add_option("--network", o.network, "network mask (PGM)")->required();
  analyze->add_option("--water", o.water, "water mask (PGM)")->required();
  analyze->add_option("--gt", o.gt, "ground-truth mask restricting U (defaults to --network)");
  analyze->add_option("--out", o.out, "report path (JSON)")->required();

  auto* metrics = app.add_subcommand("metrics", "r-neighbourhood scores of a prediction");
  metrics->add_option("--pred", o.pred, "predicted mask (PGM)")->required();
  metrics->add_option("--gt", o.gt, "ground-truth mask (PGM)")->required();
  metrics->add_option("--r", o.radii, "comma-separated radii")->delimiter(',');
  metrics->add_option("--neighborhood", o.neighborhood, "square or disk")
      ->check(CLI::IsMember({"square", "disk"}));
  metrics->add_option("--out", o.out, "report path (JSON); standard output if omitted");

  auto* refine = app.add_subcommand("refine", "iteratively complete a ground-truth network");
  refine->add_option("--gt", o.gt, "ground-truth mask (PGM)")->required();
  refine->add_option("--water", o.water, "water mask (PGM)")->required();
  auto* dir_opt = refine->add_option("--likelihood-dir", o.likelihood_dir,
                                     "directory holding iter_<i>.pfm");
  auto* prov_opt = refine->add_option("--provider", o.provider,
                                      "oracle:truth=PATH[,hit=H][,false_rate=F][,blur=K][,seed=S]");
  dir_opt->excludes(prov_opt);
  refine->add_option("--out", o.out, "refined mask (PGM)")->required();
  refine->add_option("--stats", o.stats, "per-iteration statistics (JSON)");
  refine->add_option("--dump-paths", o.dump_paths, "stamped completion paths (JSON)");
  add_refine_knobs(refine, o);

  auto* synth = app.add_subcommand("synth", "generate a synthetic network and inject gaps");
  synth->add_option("--kind", o.kind, "canal or grid")->check(CLI::IsMember({"canal", "grid"}));
  synth->add_option("--seed", o.seed, "generator seed")->required();
  synth->add_option("--rows", o.rows, "grid rows");
  synth->add_option("--cols", o.cols, "grid columns");
  synth->add_option("--trunks", o.trunks, "canal trunks");
  synth->add_option("--depth", o.depth, "canal branching depth");
  synth->add_option("--blobs", o.blobs, "water blobs");
  synth->add_option("--trunk-length", o.trunk_length, "pixel budget of a trunk");
  synth->add_option("--branches", o.branches, "branches per polyline");
  synth->add_option("--spacing", o.spacing, "road grid spacing");
  synth->add_option("--gaps", o.gaps, "number of runs to remove");
  synth->add_option("--beta", o.beta, "comma-separated run lengths")->delimiter(',');
  synth->add_option("--gap-seed", o.gap_seed, "gap seed (defaults to --seed)");
  synth->add_option("--out-dir", o.out_dir, "output directory")->required();

  auto* roadgap = app.add_subcommand("roadgap", "break a road network and repair it");
  roadgap->add_option("--gt", o.gt, "road network mask (PGM)")->required();
  roadgap->add_option("--seed", o.seed, "seed for points and, by default, gaps")->required();
  roadgap->add_option("--gaps", o.gaps, "number of runs to remove");
  roadgap->add_option("--beta", o.beta, "comma-separated run lengths")->delimiter(',');
  roadgap->add_option("--gap-seed", o.gap_seed, "gap seed (defaults to --seed)");
  roadgap->add_option("--points", o.points, "number of sampled points");
  auto* road_dir = roadgap->add_option("--likelihood-dir", o.likelihood_dir,
                                       "directory holding iter_<i>.pfm (default: perfect oracle)");
  auto* road_prov = roadgap->add_option("--provider", o.provider, "oracle:truth=PATH,...");
  road_dir->excludes(road_prov);
  roadgap->add_option("--out-dir", o.out_dir, "output directory")->required();
  add_refine_knobs(roadgap, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const CLI::Option* gap_seed = sub->get_option_no_throw("--gap-seed");
  if (gap_seed == nullptr || gap_seed->count() == 0) o.gap_seed = o.seed;
  if (sub == refine && o.likelihood_dir.empty() && o.provider.empty()) {
    err << "error: refine needs --likelihood-dir or --provider\n\n" << refine->help();
    return kUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  Context ctx;
  try {
    int code = kOk;
    const std::string name = sub->get_name();
    if (name == "analyze") code = run_analyze(o, ctx, out);
    if (name == "metrics") code = run_metrics(o, ctx, out);
    if (name == "refine") code = run_refine(o, ctx, out);
    if (name == "synth") code = run_synth(o, ctx, out);
    if (name == "roadgap") code = run_roadgap(o, ctx, out);

    if (!o.manifest.empty()) {
      Json params = resolved_parameters(app);
      params.update(resolved_parameters(*sub));
      if (params.contains("--gap-seed")) params["--gap-seed"] = std::to_string(o.gap_seed);
      Json inputs = Json::object();
      for (const auto& p : ctx.inputs) inputs[p.string()] = sha256_hex(p);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      write_json(o.manifest, {{"subcommand", name},
                              {"parameters", params},
                              {"inputs", inputs},
                              {"tool_version", kVersion},
                              {"duration_s", seconds},
                              {"timestamp", utc_timestamp()}});
    }
    return code;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  } catch (const BoundsError& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kConstraint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace netrefine::cli
