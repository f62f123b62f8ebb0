#pragma once

// Greedy minimum-dispersion vertex selection under the symmetrized steering
// cost, with spatial tiling so the vertex set covers an unbounded workspace.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "mdmp/core.hpp"
#include "mdmp/parallel.hpp"
#include "mdmp/sampling.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

using TileCoord = std::array<std::int32_t, kMaxSpatialDims>;

/// Translation lattice used to replicate a vertex set. Tile (c0, c1) covers
/// origin + c * tile_extent up to origin + (c + 1) * tile_extent.
struct TilingSpec {
  std::vector<std::size_t> spatial_dims{0, 1};
  std::vector<double> tile_extent{1.0, 1.0};
  std::vector<double> origin{-0.5, -0.5};
  int neighbor_radius = 1;

  std::size_t k() const { return spatial_dims.size(); }

  void validate(std::size_t state_dim) const {
    if (spatial_dims.size() > kMaxSpatialDims) throw ConfigError("tiling: at most two spatial dimensions");
    if (tile_extent.size() != spatial_dims.size() || origin.size() != spatial_dims.size()) {
      throw ConfigError("tiling: extent/origin length must match spatial_dims");
    }
    for (std::size_t i = 0; i < spatial_dims.size(); ++i) {
      if (spatial_dims[i] >= state_dim) throw ConfigError("tiling: spatial dimension out of range");
      if (!(tile_extent[i] > 0.0)) throw ConfigError("tiling: tile_extent must be positive");
    }
    if (neighbor_radius < 0) throw ConfigError("tiling: neighbor_radius must be >= 0");
  }

  /// Every offset in {-r..r}^k in lexicographic order (zero offset included).
  std::vector<TileCoord> offsets() const { return offsets_within(neighbor_radius); }

  std::vector<TileCoord> offsets_within(int r) const {
    std::vector<TileCoord> out;
    const std::size_t dims = k();
    if (dims == 0) {
      out.push_back(TileCoord{});
      return out;
    }
    TileCoord c{};
    for (std::size_t i = 0; i < dims; ++i) c[i] = -r;
    while (true) {
      out.push_back(c);
      std::size_t i = dims;
      while (i > 0) {
        --i;
        if (c[i] < r) {
          ++c[i];
          for (std::size_t j = i + 1; j < dims; ++j) c[j] = -r;
          break;
        }
        if (i == 0) return out;
      }
    }
  }

  /// State translated by `tile` whole tiles.
  State shifted(State s, const TileCoord& tile) const {
    for (std::size_t i = 0; i < k(); ++i) {
      s[spatial_dims[i]] += static_cast<double>(tile[i]) * tile_extent[i];
    }
    return s;
  }

  /// Tile containing the state's position.
  TileCoord tile_of(const State& s) const {
    TileCoord c{};
    for (std::size_t i = 0; i < k(); ++i) {
      c[i] = static_cast<std::int32_t>(std::floor((s[spatial_dims[i]] - origin[i]) / tile_extent[i]));
    }
    return c;
  }

  friend bool operator==(const TilingSpec&, const TilingSpec&) = default;
};

/// Tiling that never replicates (k = 0).
inline TilingSpec no_tiling() {
  TilingSpec t;
  t.spatial_dims.clear();
  t.tile_extent.clear();
  t.origin.clear();
  t.neighbor_radius = 0;
  return t;
}

struct TiledState {
  State state;
  std::size_t source = 0;
  TileCoord offset{};
};

/// V replicated over the neighbor lattice: |V| * (2r+1)^k states, offsets
/// outermost so each copy of V is contiguous.
inline std::vector<TiledState> tile_points(const std::vector<State>& vertices, const TilingSpec& tiling) {
  std::vector<TiledState> out;
  const auto offsets = tiling.offsets();
  out.reserve(vertices.size() * offsets.size());
  for (const TileCoord& o : offsets) {
    for (std::size_t i = 0; i < vertices.size(); ++i) out.push_back({tiling.shifted(vertices[i], o), i, o});
  }
  return out;
}

struct DispersionRun {
  std::vector<State> vertices;
  std::vector<double> dispersion_history;
  double final_dispersion = std::numeric_limits<double>::infinity();
  DenseSampleSet dense;
  TilingSpec tiling;
  std::vector<double> jmin;
  /// Dense-sample index each appended vertex came from (the seed is npos).
  std::vector<std::size_t> source_index;
};

class PartialResultError : public Error {
 public:
  PartialResultError(const std::string& what, DispersionRun run) : Error(what), run_(std::move(run)) {}
  const DispersionRun& run() const { return run_; }

 private:
  DispersionRun run_;
};

struct DispersionOptions {
  std::size_t vertex_cap = 512;
  std::size_t threads = 0;
  /// Called after each insertion with (iteration, |V|, current dispersion).
  std::function<void(std::size_t, std::size_t, double)> progress;
};

namespace detail {

/// Lowers jmin[i] with the symmetrized cost from every dense sample to every
/// tiled copy of one vertex.
inline void relax_against(const State& vertex, const DenseSampleSet& dense, const System& system,
                          const TilingSpec& tiling, std::vector<double>& jmin, std::size_t threads) {
  const auto offsets = tiling.offsets();
  std::vector<State> targets;
  targets.reserve(offsets.size());
  for (const TileCoord& o : offsets) targets.push_back(tiling.shifted(vertex, o));
  parallel_for(dense.points.size(), threads, [&](std::size_t i) {
    const State& xs = dense.points[i];
    double best = jmin[i];
    for (const State& xt : targets) {
      if (steer_cost_lower_bound(system, xs, xt) >= best) continue;
      const double j = std::max(steer_cost(system, xs, xt), steer_cost(system, xt, xs));
      best = std::min(best, j);
    }
    jmin[i] = best;
  });
}

/// Largest entry, lowest index on ties.
inline std::size_t argmax_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace detail

/// Greedy vertex selection. Seeds V with the zero state; after each insertion
/// the running minimum jmin is lowered against the new vertex's tiled copies
/// and the dispersion d = max jmin is recorded. Stops once d <= target;
/// otherwise the dense sample attaining d is appended. Hitting the vertex cap
/// first throws PartialResultError carrying the run so far.
inline DispersionRun min_dispersion_vertices(double target, const DenseSampleSet& dense, const System& system,
                                             const TilingSpec& tiling, const DispersionOptions& options = {}) {
  if (!(target > 0.0)) throw DomainError("min_dispersion_vertices: target dispersion must be positive");
  if (dense.points.empty()) throw DomainError("min_dispersion_vertices: empty dense set");
  validate(system);
  tiling.validate(state_dim(system));
  const State zero = zero_state(system);
  if (!dense.box.contains(zero)) throw ConfigError("min_dispersion_vertices: zero state outside the dense box");

  DispersionRun run;
  run.dense = dense;
  run.tiling = tiling;
  run.jmin.assign(dense.points.size(), std::numeric_limits<double>::infinity());
  run.vertices.push_back(zero);
  run.source_index.push_back(static_cast<std::size_t>(-1));

  for (std::size_t iter = 0;; ++iter) {
    detail::relax_against(run.vertices.back(), run.dense, system, tiling, run.jmin, options.threads);
    const std::size_t far = detail::argmax_first(run.jmin);
    const double d = run.jmin[far];
    run.dispersion_history.push_back(d);
    run.final_dispersion = d;
    if (options.progress) options.progress(iter, run.vertices.size(), d);
    if (d <= target) return run;
    if (run.vertices.size() >= options.vertex_cap) {
      throw PartialResultError("min_dispersion_vertices: vertex cap reached before the target dispersion", run);
    }
    run.vertices.push_back(run.dense.points[far]);
    run.source_index.push_back(far);
  }
}

/// max over dense samples of min over tiled V of the symmetrized cost. A lower
/// bound on the continuous dispersion of V.
inline double estimate_dispersion(const std::vector<State>& vertices, const DenseSampleSet& dense, const System& system,
                                  const TilingSpec& tiling, std::size_t threads = 0) {
  if (vertices.empty()) throw DomainError("estimate_dispersion: empty vertex set");
  std::vector<double> jmin(dense.points.size(), std::numeric_limits<double>::infinity());
  for (const State& v : vertices) detail::relax_against(v, dense, system, tiling, jmin, threads);
  double worst = 0.0;
  for (double j : jmin) worst = std::max(worst, j);
  return worst;
}

}  // namespace mdmp
