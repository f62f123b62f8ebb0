#pragma once

// Best-first search over an implicit motion-primitive graph. Collision checks
// are lazy: an entry's incoming trajectory is checked when the entry is
// popped, so each check is one trajectory against the grid. The start is
// connected by steering (accessibility) and any expanded node that can steer
// to the goal within the tolerance pushes a goal entry (departability).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "mdmp/core.hpp"
#include "mdmp/graph.hpp"
#include "mdmp/occupancy.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

enum class PlanStatus { Success, NoPath, BudgetExhausted };
enum class HeuristicKind { Zero, FreeSpaceSteer };
enum class DepartabilityMode { Steer, TerminalSet };

inline std::string to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Success:
      return "success";
    case PlanStatus::NoPath:
      return "no_path";
    case PlanStatus::BudgetExhausted:
      return "budget_exhausted";
  }
  return "?";
}

inline HeuristicKind heuristic_from_string(const std::string& s) {
  if (s == "zero") return HeuristicKind::Zero;
  if (s == "free_space_steer") return HeuristicKind::FreeSpaceSteer;
  throw ConfigError("unknown heuristic: " + s);
}

inline std::string to_string(HeuristicKind h) { return h == HeuristicKind::Zero ? "zero" : "free_space_steer"; }

inline DepartabilityMode departability_from_string(const std::string& s) {
  if (s == "steer") return DepartabilityMode::Steer;
  if (s == "terminal_set") return DepartabilityMode::TerminalSet;
  throw ConfigError("unknown departability mode: " + s);
}

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct PlanQuery {
  State start{};
  State goal{};
  double goal_cost_tolerance = kUnset;   // unset: graph dispersion
  double collision_resolution = kUnset;  // unset: dispersion / 10
  std::size_t max_collision_checks = 100000;
  HeuristicKind heuristic = HeuristicKind::Zero;
  DepartabilityMode departability = DepartabilityMode::Steer;
};

struct PlanResult {
  PlanStatus status = PlanStatus::NoPath;
  std::vector<State> node_sequence;  // start, graph states, goal
  std::vector<Trajectory> stitched;
  double total_cost = std::numeric_limits<double>::infinity();
  std::size_t collision_checks = 0;
  std::size_t expansions = 0;
  std::size_t open_list_peak = 0;
  std::size_t generated = 0;
  std::vector<State> expanded_states;  // in expansion order
  double goal_cost_tolerance = 0.0;
  double collision_resolution = 0.0;
};

/// Successor produced by a search space; `ref` lets the space rebuild the
/// trajectory later without storing it.
template <class Node, class Ref>
struct Successor {
  Node node;
  double cost = 0.0;
  Ref ref{};
};

/// Successor whose trajectory is computed up front (start connections and
/// terminal-set departures).
template <class Node>
struct ExplicitSuccessor {
  Node node;
  Trajectory traj;
};

/// Implicit tiled primitive graph as a search space.
class GraphSpace {
 public:
  using Node = GraphNode;
  using Key = GraphNode;
  using Ref = std::uint32_t;

  explicit GraphSpace(const PrimitiveGraph& g) : g_(g) {}

  const System& system() const { return g_.system; }
  double nominal_dispersion() const { return g_.dispersion; }
  const PrimitiveGraph& graph() const { return g_; }

  Key key(const Node& n) const { return n; }
  State state(const Node& n) const { return g_.world_state(static_cast<std::size_t>(n.vertex), n.tile); }
  Node root(const State& start) const { return GraphNode{-1, g_.tiling.tile_of(start)}; }

  /// Steers from the start to every vertex in the surrounding tiles and keeps
  /// connections cheaper than twice the dispersion.
  void root_successors(const State& start, std::vector<ExplicitSuccessor<Node>>& out) const {
    const double bound = 2.0 * g_.dispersion;
    const TileCoord base = g_.tiling.tile_of(start);
    for (const TileCoord& o : g_.tiling.offsets_within(std::max(1, g_.tiling.neighbor_radius))) {
      TileCoord tile{};
      for (std::size_t i = 0; i < kMaxSpatialDims; ++i) tile[i] = base[i] + o[i];
      if (g_.tiling.k() == 0 && o != TileCoord{}) continue;
      for (std::size_t v = 0; v < g_.vertices.size(); ++v) {
        const State w = g_.world_state(v, tile);
        if (steer_cost_lower_bound(g_.system, start, w) >= bound) continue;
        Trajectory t = steer(g_.system, start, w);
        if (t.cost < bound) out.push_back({GraphNode{static_cast<std::int32_t>(v), tile}, std::move(t)});
      }
    }
  }

  void successors(const Node& n, std::vector<Successor<Node, Ref>>& out) const {
    for (const Edge& e : g_.out_edges(static_cast<std::size_t>(n.vertex))) {
      GraphNode next{static_cast<std::int32_t>(e.to), n.tile};
      for (std::size_t i = 0; i < kMaxSpatialDims; ++i) next.tile[i] += e.offset[i];
      out.push_back({next, e.cost, static_cast<Ref>(g_.edge_index(e))});
    }
  }

  Trajectory trajectory(const Node& from, Ref ref) const { return world_trajectory(g_, from, g_.edges[ref]); }

  /// Tiled vertices that reach the goal with cost <= tol, with their
  /// departure trajectories.
  std::vector<ExplicitSuccessor<Node>> terminal_nodes(const State& goal, double tol) const {
    std::vector<ExplicitSuccessor<Node>> out;
    const TileCoord base = g_.tiling.tile_of(goal);
    int r = 0;
    if (g_.tiling.k() > 0) {
      const double reach = position_reach_bound(g_.system, tol);
      for (double e : g_.tiling.tile_extent) r = std::max(r, static_cast<int>(std::ceil(reach / e)) + 1);
    }
    for (const TileCoord& o : g_.tiling.offsets_within(r)) {
      TileCoord tile{};
      for (std::size_t i = 0; i < kMaxSpatialDims; ++i) tile[i] = base[i] + o[i];
      for (std::size_t v = 0; v < g_.vertices.size(); ++v) {
        const State w = g_.world_state(v, tile);
        if (steer_cost_lower_bound(g_.system, w, goal) > tol) continue;
        Trajectory t = steer(g_.system, w, goal);
        if (t.cost <= tol) out.push_back({GraphNode{static_cast<std::int32_t>(v), tile}, std::move(t)});
      }
    }
    return out;
  }

 private:
  const PrimitiveGraph& g_;
};

namespace planner_detail {

template <class Space>
struct Entry {
  double f = 0.0;
  double g = 0.0;
  bool goal = false;
  typename Space::Key key{};
  typename Space::Node node{};
  std::int32_t parent = -1;  // closed record the entry was generated from
  typename Space::Ref ref{};
  std::int32_t traj = -1;  // index into the explicit trajectory store
  std::uint64_t seq = 0;
};

/// Heap order: f, then g, then goal entries, then node key, then insertion.
template <class Space>
struct Worse {
  bool operator()(const Entry<Space>& a, const Entry<Space>& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g > b.g;
    if (a.goal != b.goal) return b.goal;
    if (a.key != b.key) return b.key < a.key;
    return a.seq > b.seq;
  }
};

template <class Space>
struct Record {
  typename Space::Node node{};
  State state{};
  std::int32_t parent = -1;
  typename Space::Ref ref{};
  std::int32_t traj = -1;
  double g = 0.0;
};

}  // namespace planner_detail

/// Searches `space` from query.start to query.goal. The space supplies the
/// node identity, successor generation and trajectory reconstruction.
template <class Space>
PlanResult best_first_search(const Space& space, const OccupancyGrid& grid, const PlanQuery& query) {
  using E = planner_detail::Entry<Space>;
  using R = planner_detail::Record<Space>;
  const System& sys = space.system();
  if (query.start.dim != state_dim(sys) || query.goal.dim != state_dim(sys)) {
    throw QueryError("plan: start/goal dimension does not match the system");
  }
  if (grid.occupied_at(query.start[0], query.start[1])) throw QueryError("plan: start is in collision");
  if (grid.occupied_at(query.goal[0], query.goal[1])) throw QueryError("plan: goal is in collision");

  PlanResult res;
  const double d = space.nominal_dispersion();
  res.goal_cost_tolerance = std::isnan(query.goal_cost_tolerance) ? d : query.goal_cost_tolerance;
  res.collision_resolution = std::isnan(query.collision_resolution) ? d / 10.0 : query.collision_resolution;
  if (!(res.goal_cost_tolerance > 0.0) || !(res.collision_resolution > 0.0)) {
    throw ConfigError("plan: goal_cost_tolerance and collision_resolution must be positive");
  }
  const double tol = res.goal_cost_tolerance;

  auto h = [&](const State& s) {
    return query.heuristic == HeuristicKind::Zero ? 0.0 : steer_cost(sys, s, query.goal);
  };

  std::map<typename Space::Key, std::int32_t> terminal;
  std::vector<Trajectory> store;
  if (query.departability == DepartabilityMode::TerminalSet) {
    if constexpr (requires { space.terminal_nodes(query.goal, tol); }) {
      for (auto& t : space.terminal_nodes(query.goal, tol)) {
        terminal.emplace(space.key(t.node), static_cast<std::int32_t>(store.size()));
        store.push_back(std::move(t.traj));
      }
    } else {
      throw ConfigError("plan: terminal_set departability needs a primitive graph");
    }
  }

  std::priority_queue<E, std::vector<E>, planner_detail::Worse<Space>> open;
  std::set<typename Space::Key> closed;
  std::vector<R> records;
  std::uint64_t seq = 0;

  const auto root = space.root(query.start);
  open.push(E{h(query.start), 0.0, false, space.key(root), root, -1, {}, -1, seq++});
  res.generated = 1;

  std::vector<Successor<typename Space::Node, typename Space::Ref>> succ;
  std::vector<ExplicitSuccessor<typename Space::Node>> explicit_succ;

  auto incoming = [&](std::int32_t parent, const typename Space::Ref& ref, std::int32_t traj) -> Trajectory {
    if (traj >= 0) return store[static_cast<std::size_t>(traj)];
    return space.trajectory(records[static_cast<std::size_t>(parent)].node, ref);
  };

  while (!open.empty()) {
    res.open_list_peak = std::max(res.open_list_peak, open.size());
    const E e = open.top();
    open.pop();

    if (e.goal) {
      if (res.collision_checks >= query.max_collision_checks) {
        res.status = PlanStatus::BudgetExhausted;
        return res;
      }
      const Trajectory& dep = store[static_cast<std::size_t>(e.traj)];
      if (!collision_free(dep, grid, res.collision_resolution, res.collision_checks)) continue;

      std::vector<Trajectory> rev{dep};
      std::vector<State> states{query.goal};
      for (std::int32_t r = e.parent; r >= 0; r = records[static_cast<std::size_t>(r)].parent) {
        const R& rec = records[static_cast<std::size_t>(r)];
        states.push_back(rec.state);
        if (rec.parent >= 0) rev.push_back(incoming(rec.parent, rec.ref, rec.traj));
      }
      res.stitched.assign(rev.rbegin(), rev.rend());
      res.node_sequence.assign(states.rbegin(), states.rend());
      res.total_cost = 0.0;
      for (const Trajectory& t : res.stitched) res.total_cost += t.cost;
      res.status = PlanStatus::Success;
      return res;
    }

    if (closed.contains(e.key)) continue;
    State here = query.start;
    if (e.parent >= 0) {
      if (res.collision_checks >= query.max_collision_checks) {
        res.status = PlanStatus::BudgetExhausted;
        return res;
      }
      if (!collision_free(incoming(e.parent, e.ref, e.traj), grid, res.collision_resolution, res.collision_checks)) {
        continue;
      }
      here = space.state(e.node);
    }
    closed.insert(e.key);
    const auto self = static_cast<std::int32_t>(records.size());
    records.push_back(R{e.node, here, e.parent, e.ref, e.traj, e.g});
    ++res.expansions;
    res.expanded_states.push_back(here);

    // Departability.
    const bool is_root = e.parent < 0;
    if (query.departability == DepartabilityMode::Steer || is_root) {
      if (steer_cost_lower_bound(sys, here, query.goal) <= tol) {
        Trajectory dep = steer(sys, here, query.goal);
        if (dep.cost <= tol) {
          const double g = e.g + dep.cost;
          open.push(E{g, g, true, e.key, e.node, self, {}, static_cast<std::int32_t>(store.size()), seq++});
          store.push_back(std::move(dep));
          ++res.generated;
        }
      }
    } else if (auto it = terminal.find(e.key); it != terminal.end()) {
      const double g = e.g + store[static_cast<std::size_t>(it->second)].cost;
      open.push(E{g, g, true, e.key, e.node, self, {}, it->second, seq++});
      ++res.generated;
    }

    // Successors.
    if (is_root) {
      explicit_succ.clear();
      space.root_successors(query.start, explicit_succ);
      for (auto& s : explicit_succ) {
        const auto k = space.key(s.node);
        if (closed.contains(k)) continue;
        const double g = e.g + s.traj.cost;
        open.push(E{g + h(space.state(s.node)), g, false, k, s.node, self, {}, static_cast<std::int32_t>(store.size()),
                    seq++});
        store.push_back(std::move(s.traj));
        ++res.generated;
      }
    } else {
      succ.clear();
      space.successors(e.node, succ);
      for (const auto& s : succ) {
        const auto k = space.key(s.node);
        if (closed.contains(k)) continue;
        const double g = e.g + s.cost;
        open.push(E{g + h(space.state(s.node)), g, false, k, s.node, self, s.ref, -1, seq++});
        ++res.generated;
      }
    }
  }
  res.status = PlanStatus::NoPath;
  return res;
}

inline PlanResult plan(const PrimitiveGraph& graph, const OccupancyGrid& grid, const PlanQuery& query) {
  return best_first_search(GraphSpace(graph), grid, query);
}

/// total_cost / J(start, goal); 1 when start and goal coincide.
inline double plan_cost_optimality_gap(const PlanResult& result, const System& system, const State& start,
                                       const State& goal) {
  if (result.status != PlanStatus::Success) throw QueryError("optimality gap: plan did not succeed");
  const double direct = steer_cost(system, start, goal);
  if (direct <= 0.0) return 1.0;
  return result.total_cost / direct;
}

inline double plan_cost_optimality_gap(const PrimitiveGraph& graph, const OccupancyGrid& grid,
                                       const PlanQuery& query) {
  return plan_cost_optimality_gap(plan(graph, grid, query), graph.system, query.start, query.goal);
}

inline nlohmann::json state_json(const State& s) {
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t i = 0; i < s.dim; ++i) a.push_back(s[i]);
  return a;
}

inline nlohmann::json plan_json(const PlanResult& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["total_cost"] = r.status == PlanStatus::Success ? nlohmann::json(r.total_cost) : nlohmann::json(nullptr);
  j["collision_checks"] = r.collision_checks;
  j["expansions"] = r.expansions;
  j["open_list_peak"] = r.open_list_peak;
  j["generated"] = r.generated;
  j["goal_cost_tolerance"] = r.goal_cost_tolerance;
  j["collision_resolution"] = r.collision_resolution;
  j["node_sequence"] = nlohmann::json::array();
  for (const State& s : r.node_sequence) j["node_sequence"].push_back(state_json(s));
  j["trajectories"] = nlohmann::json::array();
  for (const Trajectory& t : r.stitched) {
    j["trajectories"].push_back(
        {{"start", state_json(t.start)}, {"end", state_json(t.end)}, {"cost", t.cost}, {"duration", t.duration}});
  }
  return j;
}

}  // namespace mdmp
