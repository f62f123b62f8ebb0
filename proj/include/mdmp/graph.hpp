#pragma once

// Motion-primitive graph: vertices from a dispersion run, directed edges for
// every (vertex, tiled vertex) pair whose steering cost is below twice the
// dispersion, and the implicit infinite view obtained by tiling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "mdmp/core.hpp"
#include "mdmp/dispersion.hpp"
#include "mdmp/parallel.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

inline constexpr std::uint32_t kGraphFormatVersion = 1;

struct Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  TileCoord offset{};  // target is vertices[to] shifted by `offset` tiles
  double cost = 0.0;
  Trajectory traj;
};

struct PrimitiveGraph {
  System system{};
  std::vector<State> vertices;
  std::vector<Edge> edges;  // sorted by (from, to, offset)
  double dispersion = 0.0;
  TilingSpec tiling{};
  std::uint32_t format_version = kGraphFormatVersion;

  /// Rebuilds the per-vertex out-edge index. Call after mutating `edges`.
  void reindex() {
    out_begin_.assign(vertices.size() + 1, 0);
    for (const Edge& e : edges) ++out_begin_[e.from + 1];
    for (std::size_t i = 1; i < out_begin_.size(); ++i) out_begin_[i] += out_begin_[i - 1];
  }

  std::span<const Edge> out_edges(std::size_t vertex) const {
    if (vertex >= vertices.size()) throw DomainError("graph: vertex index out of range");
    return {edges.data() + out_begin_[vertex], edges.data() + out_begin_[vertex + 1]};
  }
  std::size_t edge_index(const Edge& e) const { return static_cast<std::size_t>(&e - edges.data()); }

  std::size_t out_degree(std::size_t vertex) const { return out_edges(vertex).size(); }

  double mean_out_degree() const {
    return vertices.empty() ? 0.0 : static_cast<double>(edges.size()) / static_cast<double>(vertices.size());
  }

  /// World state of vertex `v` placed in tile `tile`.
  State world_state(std::size_t v, const TileCoord& tile) const { return tiling.shifted(vertices.at(v), tile); }

 private:
  std::vector<std::size_t> out_begin_;
};

inline bool tile_less(const TileCoord& a, const TileCoord& b) { return a < b; }

/// Builds the directed edge set for a vertex set with dispersion d: an edge
/// v_i -> v_j + offset exists iff 0 < J < 2d, over every offset in the
/// neighbor lattice, excluding the identity pair at zero offset.
inline PrimitiveGraph build_graph(const System& system, const std::vector<State>& vertices, double dispersion,
                                  const TilingSpec& tiling, std::size_t threads = 0) {
  if (!std::isfinite(dispersion)) throw DomainError("build_graph: dispersion must be finite");
  PrimitiveGraph g;
  g.system = system;
  g.vertices = vertices;
  g.dispersion = dispersion;
  g.tiling = tiling;
  const double bound = 2.0 * dispersion;
  const auto offsets = tiling.offsets();

  std::vector<std::vector<Edge>> per_vertex(vertices.size());
  parallel_for(vertices.size(), threads, [&](std::size_t i) {
    auto& out = per_vertex[i];
    for (std::size_t j = 0; j < vertices.size(); ++j) {
      for (const TileCoord& o : offsets) {
        if (i == j && o == TileCoord{}) continue;
        const State target = tiling.shifted(vertices[j], o);
        if (steer_cost_lower_bound(system, vertices[i], target) >= bound) continue;
        Trajectory t = steer(system, vertices[i], target);
        if (t.cost > 0.0 && t.cost < bound) {
          out.push_back(Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), o, t.cost, std::move(t)});
        }
      }
    }
  });
  for (auto& v : per_vertex) {
    for (auto& e : v) g.edges.push_back(std::move(e));
  }
  g.reindex();
  return g;
}

inline PrimitiveGraph build_edges(const DispersionRun& run, const System& system, std::size_t threads = 0) {
  return build_graph(system, run.vertices, run.final_dispersion, run.tiling, threads);
}

/// The run as it stood when the dispersion first reached `target`: the
/// greedy selection is deterministic, so this equals a fresh run with that
/// target.
inline DispersionRun truncate_run(const DispersionRun& run, double target) {
  for (std::size_t i = 0; i < run.dispersion_history.size(); ++i) {
    if (run.dispersion_history[i] <= target) {
      DispersionRun out;
      out.vertices.assign(run.vertices.begin(), run.vertices.begin() + static_cast<std::ptrdiff_t>(i + 1));
      out.source_index.assign(run.source_index.begin(), run.source_index.begin() + static_cast<std::ptrdiff_t>(i + 1));
      out.dispersion_history.assign(run.dispersion_history.begin(),
                                    run.dispersion_history.begin() + static_cast<std::ptrdiff_t>(i + 1));
      out.final_dispersion = run.dispersion_history[i];
      out.dense = run.dense;
      out.tiling = run.tiling;
      return out;
    }
  }
  throw DomainError("truncate_run: run never reached the requested dispersion");
}

/// Node of the implicit tiled graph.
struct GraphNode {
  std::int32_t vertex = 0;
  TileCoord tile{};

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
  friend auto operator<=>(const GraphNode&, const GraphNode&) = default;
};

struct Expansion {
  GraphNode node;
  double cost = 0.0;
  Trajectory traj;  // world frame
  std::size_t edge = 0;
};

/// World-frame copy of an edge trajectory leaving `node`.
inline Trajectory world_trajectory(const PrimitiveGraph& g, const GraphNode& node, const Edge& e) {
  TileCoord to_tile{};
  for (std::size_t i = 0; i < kMaxSpatialDims; ++i) to_tile[i] = node.tile[i] + e.offset[i];
  return e.traj.reanchored(g.world_state(e.from, node.tile), g.world_state(e.to, to_tile));
}

/// Out-edges of a node of the implicit graph. Unbounded in tile coordinates.
inline std::vector<Expansion> expand(const PrimitiveGraph& g, const GraphNode& node) {
  if (node.vertex < 0 || static_cast<std::size_t>(node.vertex) >= g.vertices.size()) {
    throw DomainError("expand: vertex index out of range");
  }
  std::vector<Expansion> out;
  for (const Edge& e : g.out_edges(static_cast<std::size_t>(node.vertex))) {
    GraphNode next{static_cast<std::int32_t>(e.to), node.tile};
    for (std::size_t i = 0; i < kMaxSpatialDims; ++i) next.tile[i] += e.offset[i];
    out.push_back({next, e.cost, world_trajectory(g, node, e), g.edge_index(e)});
  }
  return out;
}

}  // namespace mdmp
