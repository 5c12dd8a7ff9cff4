#include "netrefine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "netrefine/error.hpp"
#include "netrefine/morphology.hpp"
#include "netrefine/reachability.hpp"
#include "random.hpp"

namespace netrefine {

namespace {

std::vector<Pixel> bresenham(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  const int dr = std::abs(b.row - a.row);
  const int dc = std::abs(b.col - a.col);
  const int sr = a.row < b.row ? 1 : -1;
  const int sc = a.col < b.col ? 1 : -1;
  int err = dc - dr;
  Pixel p = a;
  for (;;) {
    out.push_back(p);
    if (p == b) break;
    const int e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      p.col += sc;
    }
    if (e2 < dc) {
      err += dc;
      p.row += sr;
    }
  }
  return out;
}

int chebyshev(Pixel a, Pixel b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

// Grows polylines on a claim grid: every committed pixel claims the cells
// within kMargin of it for its polyline, and a polyline may only step onto a
// cell that is unclaimed, claimed by its own recent pixels, or claimed by its
// designated anchor owner close to the anchor.
class NetworkBuilder {
 public:
  static constexpr int kMargin = 5;
  static constexpr int kBorder = 3;
  static constexpr int kWaterOwner = -2;
  static constexpr int kFree = -1;

  NetworkBuilder(const SynthConfig& cfg, detail::Rng& rng)
      : cfg_(cfg),
        rng_(rng),
        network_(cfg.shape),
        water_(cfg.shape),
        owner_(cfg.shape.size(), kFree),
        seq_(cfg.shape.size(), 0) {}

  SynthNetwork build() {
    place_water();
    struct Pending {
      int owner;
      int depth;
      int budget;
      std::vector<Pixel> pixels;
    };
    std::vector<Pending> lines;

    const int blobs = static_cast<int>(blobs_.size());
    std::vector<double> base_angle(blobs_.size());
    for (auto& a : base_angle) a = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    for (int t = 0; t < cfg_.trunk_count; ++t) {
      const int b = t % blobs;
      const int on_blob = (cfg_.trunk_count - b + blobs - 1) / blobs;
      const double angle = base_angle[b] + (t / blobs) * 2.0 * std::numbers::pi / on_blob +
                           rng_.uniform(-0.2, 0.2);
      auto root = find_root(blobs_[b], angle);
      if (!root) continue;
      const int owner = next_owner_++;
      commit(*root, owner, 0);
      std::vector<Pixel> pixels{*root};
      auto rest = grow(owner, *root, angle, cfg_.trunk_length - 1, kWaterOwner, 1, 0.35);
      pixels.insert(pixels.end(), rest.begin(), rest.end());
      lines.push_back({owner, 0, cfg_.trunk_length, std::move(pixels)});
    }
    if (lines.empty()) throw ParameterError("synthetic network: no trunk could be rooted");

    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].depth >= cfg_.branch_depth) continue;
      const std::vector<Pixel> parent = lines[i].pixels;
      const int n = static_cast<int>(parent.size());
      if (n < 20) continue;
      std::vector<int> taken;
      for (int k = 0; k < cfg_.branches_per_line; ++k) {
        const int at = rng_.between(8, n - 9);
        const bool crowded = std::any_of(taken.begin(), taken.end(),
                                         [&](int o) { return std::abs(o - at) < 12; });
        const Pixel back = parent[at - 4];
        const Pixel ahead = parent[at + 4];
        const double along = std::atan2(ahead.row - back.row, ahead.col - back.col);
        const double side = rng_.bernoulli(0.5) ? 1.0 : -1.0;
        const double heading = along + side * rng_.uniform(1.05, 1.57);
        const int budget = lines[i].budget / 2;
        if (crowded) continue;
        const int owner = next_owner_++;
        auto pixels = grow(owner, parent[at], heading, budget, lines[i].owner, 0, 0.45);
        if (pixels.empty()) continue;
        taken.push_back(at);
        lines.push_back({owner, lines[i].depth + 1, budget, std::move(pixels)});
      }
    }

    BinaryMask skeleton = thin(network_);
    const auto part = partition(skeleton, water_, skeleton);
    if (part.unreachable_count() != 0) {
      throw Error("synthetic network generator produced unreachable pixels");
    }
    return {std::move(skeleton), std::move(water_)};
  }

 private:
  struct Blob {
    Pixel center;
    int radius;
  };

  void place_water() {
    if (cfg_.water_blobs < 1 || cfg_.trunk_count < 1) {
      throw ParameterError("synthetic network needs at least one water blob and one trunk");
    }
    const GridShape& shape = cfg_.shape;
    for (int b = 0; b < cfg_.water_blobs; ++b) {
      bool placed = false;
      for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
        const int radius = rng_.between(6, 11);
        const int lo = radius + kBorder + kMargin + 2;
        if (shape.rows() - 1 - lo < lo || shape.cols() - 1 - lo < lo) break;
        const Pixel c{rng_.between(lo, shape.rows() - 1 - lo), rng_.between(lo, shape.cols() - 1 - lo)};
        const bool clash = std::any_of(blobs_.begin(), blobs_.end(), [&](const Blob& o) {
          const double d = std::hypot(o.center.row - c.row, o.center.col - c.col);
          return d < o.radius + radius + 40;
        });
        if (clash) continue;
        blobs_.push_back({c, radius});
        placed = true;
      }
      if (!placed) {
        throw ParameterError("synthetic network: cannot place " + std::to_string(cfg_.water_blobs) +
                             " water blobs in " + shape.to_string());
      }
    }
    for (const Blob& blob : blobs_) {
      for (int dr = -blob.radius; dr <= blob.radius; ++dr) {
        for (int dc = -blob.radius; dc <= blob.radius; ++dc) {
          if (dr * dr + dc * dc <= blob.radius * blob.radius) {
            water_.set({blob.center.row + dr, blob.center.col + dc});
          }
        }
      }
    }
    for (Pixel p : to_pixels(water_)) claim(p, kWaterOwner, 0);
  }

  bool inside(Pixel p) const {
    return p.row >= kBorder && p.col >= kBorder && p.row < cfg_.shape.rows() - kBorder &&
           p.col < cfg_.shape.cols() - kBorder;
  }

  bool touches_water(Pixel p) const {
    return water_.test(p) || neighbor_count(water_, p) > 0;
  }

  std::optional<Pixel> find_root(const Blob& blob, double angle) const {
    for (int rad = blob.radius; rad <= blob.radius + 3; ++rad) {
      const Pixel p{blob.center.row + static_cast<int>(std::lround(rad * std::sin(angle))),
                    blob.center.col + static_cast<int>(std::lround(rad * std::cos(angle)))};
      if (!inside(p) || water_.test(p) || neighbor_count(water_, p) == 0) continue;
      const int o = owner_[cfg_.shape.index(p)];
      if (o != kFree && o != kWaterOwner) return std::nullopt;
      return p;
    }
    return std::nullopt;
  }

  void claim(Pixel p, int owner, int seq) {
    for (int r = p.row - kMargin; r <= p.row + kMargin; ++r) {
      for (int c = p.col - kMargin; c <= p.col + kMargin; ++c) {
        if (!cfg_.shape.contains(r, c)) continue;
        const std::size_t i = cfg_.shape.index({r, c});
        if (owner_[i] == kFree) {
          owner_[i] = owner;
          seq_[i] = seq;
        }
      }
    }
  }

  void commit(Pixel p, int owner, int seq) {
    network_.set(p);
    claim(p, owner, seq);
  }

  bool may_enter(Pixel q, int owner, int seq, int anchor_owner, Pixel anchor) const {
    if (!inside(q) || network_.test(q) || touches_water(q)) return false;
    const std::size_t i = cfg_.shape.index(q);
    const int o = owner_[i];
    if (o == kFree) return true;
    if (o == owner) return seq - seq_[i] <= 2 * kMargin + 2;
    return o == anchor_owner && chebyshev(q, anchor) <= 2 * kMargin + 2;
  }

  // Extends a polyline from `from` (not itself part of the new pixels) in
  // straight random segments until the budget is spent or the next pixel is
  // not allowed.
  std::vector<Pixel> grow(int owner, Pixel from, double heading, int budget, int anchor_owner,
                          int first_seq, double turn) {
    std::vector<Pixel> pixels;
    Pixel tip = from;
    bool first_segment = true;
    while (static_cast<int>(pixels.size()) < budget) {
      if (!first_segment) heading += rng_.uniform(-turn, turn);
      first_segment = false;
      const int length = rng_.between(12, 36);
      const Pixel target{tip.row + static_cast<int>(std::lround(length * std::sin(heading))),
                         tip.col + static_cast<int>(std::lround(length * std::cos(heading)))};
      const auto line = bresenham(tip, target);
      for (std::size_t k = 1; k < line.size(); ++k) {
        const int seq = first_seq + static_cast<int>(pixels.size());
        if (!may_enter(line[k], owner, seq, anchor_owner, from)) return pixels;
        commit(line[k], owner, seq);
        pixels.push_back(line[k]);
        tip = line[k];
        if (static_cast<int>(pixels.size()) >= budget) return pixels;
      }
    }
    return pixels;
  }

  const SynthConfig& cfg_;
  detail::Rng& rng_;
  BinaryMask network_;
  BinaryMask water_;
  std::vector<int> owner_;
  std::vector<int> seq_;
  std::vector<Blob> blobs_;
  int next_owner_ = 0;
};

}  // namespace

SynthNetwork generate_network(const SynthConfig& cfg) {
  detail::Rng rng(cfg.seed);
  NetworkBuilder builder(cfg, rng);
  return builder.build();
}

BinaryMask generate_grid_roads(const RoadGridConfig& cfg) {
  if (cfg.spacing < 8) throw ParameterError("road spacing must be at least 8");
  detail::Rng rng(cfg.seed);
  const int jitter = cfg.spacing / 8;
  auto positions = [&](int extent) {
    std::vector<int> out;
    const int margin = cfg.spacing / 2;
    for (int base = margin; base <= extent - 1 - margin; base += cfg.spacing) {
      out.push_back(std::clamp(base + rng.between(-jitter, jitter), 1, extent - 2));
    }
    if (out.size() < 2) {
      throw ParameterError("road grid needs room for at least two lines per axis");
    }
    return out;
  };
  const auto rows = positions(cfg.shape.rows());
  const auto cols = positions(cfg.shape.cols());

  BinaryMask roads(cfg.shape);
  for (int r : rows) {
    for (int c = cols.front(); c <= cols.back(); ++c) roads.set({r, c});
  }
  for (int c : cols) {
    for (int r = rows.front(); r <= rows.back(); ++r) roads.set({r, c});
  }
  return roads;
}

namespace {

struct GapSites {
  const BinaryMask& net;
  const BinaryMask& near_water;

  int degree(Pixel p) const { return neighbor_count(net, p); }

  bool eligible(Pixel p) const {
    if (!net.test(p) || near_water.test(p) || degree(p) != 2) return false;
    for (auto [dr, dc] : kMooreOffsets) {
      const Pixel q{p.row + dr, p.col + dc};
      if (net.test_or_zero(q.row, q.col) && degree(q) > 2) return false;
    }
    return true;
  }

  // Ordered run of eligible pixels through `seed`.
  std::vector<Pixel> chain(Pixel seed) const {
    std::vector<Pixel> sides[2];
    std::vector<Pixel> first_steps;
    for (auto [dr, dc] : kMooreOffsets) {
      const Pixel q{seed.row + dr, seed.col + dc};
      if (net.shape().contains(q) && eligible(q)) first_steps.push_back(q);
    }
    std::vector<Pixel> seen{seed};
    auto visited = [&](Pixel p) { return std::find(seen.begin(), seen.end(), p) != seen.end(); };
    for (std::size_t s = 0; s < first_steps.size() && s < 2; ++s) {
      Pixel prev = seed;
      Pixel cur = first_steps[s];
      while (!visited(cur)) {
        seen.push_back(cur);
        sides[s].push_back(cur);
        std::optional<Pixel> next;
        for (auto [dr, dc] : kMooreOffsets) {
          const Pixel q{cur.row + dr, cur.col + dc};
          if (q != prev && net.shape().contains(q) && !visited(q) && eligible(q)) {
            next = q;
            break;
          }
        }
        if (!next) break;
        prev = cur;
        cur = *next;
      }
    }
    std::vector<Pixel> out(sides[0].rbegin(), sides[0].rend());
    out.push_back(seed);
    out.insert(out.end(), sides[1].begin(), sides[1].end());
    return out;
  }
};

}  // namespace

GapResult inject_gaps(const BinaryMask& network, const BinaryMask& water, const GapSpec& spec) {
  require_same_shape(network.shape(), water.shape(), "inject_gaps");
  if (spec.alpha < 0) throw ParameterError("gap count must be non-negative");
  if (spec.alpha > 0 && spec.beta_choices.empty()) throw ParameterError("no gap lengths given");
  for (int b : spec.beta_choices) {
    if (b < 1) throw ParameterError("gap lengths must be positive");
  }

  detail::Rng rng(spec.seed);
  GapResult result{network, {}, 0};
  const BinaryMask near_water = dilate(water, 3);
  std::vector<Pixel> pixels = to_pixels(network);
  GapSites sites{result.broken, near_water};

  for (int k = 0; k < spec.alpha; ++k) {
    const int beta = spec.beta_choices[rng.index(spec.beta_choices.size())];
    std::erase_if(pixels, [&](Pixel p) { return !result.broken.test(p); });
    std::vector<Pixel> eligible;
    for (Pixel p : pixels) {
      if (sites.eligible(p)) eligible.push_back(p);
    }
    if (eligible.empty()) {
      result.shortfall = spec.alpha - k;
      break;
    }
    const auto run = sites.chain(eligible[rng.index(eligible.size())]);
    const std::size_t length = std::min<std::size_t>(static_cast<std::size_t>(beta), run.size());
    const std::size_t start = rng.index(run.size() - length + 1);
    std::vector<Pixel> cut(run.begin() + static_cast<std::ptrdiff_t>(start),
                           run.begin() + static_cast<std::ptrdiff_t>(start + length));
    for (Pixel p : cut) result.broken.reset(p);
    result.removed.push_back(std::move(cut));
  }
  return result;
}

OracleProvider::OracleProvider(const BinaryMask& true_network, double hit, double false_rate,
                               int blur_kernel, std::uint64_t seed)
    : raster_(true_network.shape()) {
  if (!(hit >= 0.0 && hit <= 1.0)) throw ParameterError("oracle hit must lie in [0, 1]");
  if (!(false_rate >= 0.0 && false_rate <= 1.0)) {
    throw ParameterError("oracle false rate must lie in [0, 1]");
  }
  const BinaryMask cover = dilate(true_network, blur_kernel);
  detail::Rng rng(seed);
  std::vector<float> values(true_network.shape().size(), 0.0f);
  auto bits = cover.bits();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (bits[i]) {
      values[i] = static_cast<float>(hit);
    } else if (false_rate > 0.0 && rng.bernoulli(false_rate)) {
      values[i] = 1.0f;
    }
  }
  raster_ = LikelihoodRaster(true_network.shape(), std::move(values));
}

LikelihoodRaster OracleProvider::produce(const BinaryMask& current_gt, int /*iteration*/) {
  require_same_shape(current_gt.shape(), raster_.shape(), "oracle provider");
  return raster_;
}

}  // namespace netrefine
