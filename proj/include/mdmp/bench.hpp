#pragma once

// Experiment harness: seeded corridor maps, certified-clearance maps built
// around a reference motion, method sweeps with CSV output, and completeness
// trials.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mdmp/baseline.hpp"
#include "mdmp/core.hpp"
#include "mdmp/graph.hpp"
#include "mdmp/occupancy.hpp"
#include "mdmp/parallel.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

struct RandomCorridors {
  double corridor_width = 1.0;
  double obstacle_density = 0.3;
};

struct CertifiedClearance {
  double delta = 1.0;
  std::vector<State> waypoints;
};

struct MapSpec {
  std::uint64_t seed = 0;
  std::size_t width = 100;
  std::size_t height = 100;
  double resolution = 0.1;
  std::array<double, 2> origin{0.0, 0.0};
  std::variant<RandomCorridors, CertifiedClearance> style{RandomCorridors{}};
};

// ---------------------------------------------------------------------------
// Random corridor maps

namespace bench_detail {

inline double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = ax + t * dx - px, qy = ay + t * dy - py;
  return std::sqrt(qx * qx + qy * qy);
}

inline std::size_t border_cells(const MapSpec& spec, const RandomCorridors& rc) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.5 * rc.corridor_width / spec.resolution)));
}

}  // namespace bench_detail

/// Start and goal positions of a corridor map: opposite corners, inset past
/// the border wall by half a corridor width.
inline std::array<std::array<double, 2>, 2> corridor_endpoints(const MapSpec& spec) {
  const auto& rc = std::get<RandomCorridors>(spec.style);
  const double inset = static_cast<double>(bench_detail::border_cells(spec, rc)) * spec.resolution + 0.5 * rc.corridor_width;
  const double w = static_cast<double>(spec.width) * spec.resolution;
  const double h = static_cast<double>(spec.height) * spec.resolution;
  return {{{spec.origin[0] + inset, spec.origin[1] + inset},
           {spec.origin[0] + w - inset, spec.origin[1] + h - inset}}};
}

/// Seeded rectangular clutter inside a solid border. A corridor of the given
/// width along a random polyline from the start corner to the goal corner is
/// kept free; rectangles are added until the obstacle density (fraction of
/// interior cells) is reached. Density 0 gives an empty map with no border.
inline OccupancyGrid random_corridors_map(const MapSpec& spec) {
  const auto& rc = std::get<RandomCorridors>(spec.style);
  if (!(rc.corridor_width > 0.0)) throw ConfigError("map: corridor_width must be positive");
  if (rc.obstacle_density < 0.0 || rc.obstacle_density >= 1.0) throw ConfigError("map: obstacle_density must be in [0, 1)");
  OccupancyGrid grid(spec.width, spec.height, spec.resolution, spec.origin);
  if (rc.obstacle_density == 0.0) return grid;

  const std::size_t b = bench_detail::border_cells(spec, rc);
  if (spec.width <= 2 * b + 2 || spec.height <= 2 * b + 2) throw ConfigError("map: too small for its border");
  Rng rng(spec.seed);

  const auto ends = corridor_endpoints(spec);
  std::vector<std::array<double, 2>> path{ends[0]};
  const double lo_x = ends[0][0], hi_x = ends[1][0], lo_y = ends[0][1], hi_y = ends[1][1];
  constexpr int kBends = 3;
  for (int i = 1; i <= kBends; ++i) {
    const double fx = (static_cast<double>(i) + rng.uniform(-0.4, 0.4)) / (kBends + 1);
    path.push_back({lo_x + fx * (hi_x - lo_x), rng.uniform(lo_y, hi_y)});
  }
  path.push_back(ends[1]);

  std::vector<std::uint8_t> keep(spec.width * spec.height, 0);
  for (std::size_t cy = 0; cy < spec.height; ++cy) {
    for (std::size_t cx = 0; cx < spec.width; ++cx) {
      const auto c = grid.center(cx, cy);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        if (bench_detail::segment_distance(c[0], c[1], path[k][0], path[k][1], path[k + 1][0], path[k + 1][1]) <=
            0.5 * rc.corridor_width) {
          keep[cy * spec.width + cx] = 1;
          break;
        }
      }
    }
  }

  for (std::size_t cy = 0; cy < spec.height; ++cy) {
    for (std::size_t cx = 0; cx < spec.width; ++cx) {
      if (cx < b || cy < b || cx >= spec.width - b || cy >= spec.height - b) grid.set(cx, cy, true);
    }
  }

  const std::size_t iw = spec.width - 2 * b, ih = spec.height - 2 * b;
  const auto target = static_cast<std::size_t>(rc.obstacle_density * static_cast<double>(iw * ih));
  std::size_t filled = 0;
  const auto min_side = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(rc.corridor_width / spec.resolution)));
  const std::size_t max_side = std::max<std::size_t>(min_side + 1, std::min(iw, ih) / 4);
  for (int attempt = 0; attempt < 100000 && filled < target; ++attempt) {
    const std::size_t w = min_side + rng.below(max_side - min_side + 1);
    const std::size_t h = min_side + rng.below(max_side - min_side + 1);
    const std::size_t x0 = b + rng.below(iw);
    const std::size_t y0 = b + rng.below(ih);
    for (std::size_t cy = y0; cy < std::min(y0 + h, spec.height - b); ++cy) {
      for (std::size_t cx = x0; cx < std::min(x0 + w, spec.width - b); ++cx) {
        if (keep[cy * spec.width + cx] || grid.occupied(cx, cy)) continue;
        grid.set(cx, cy, true);
        ++filled;
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Certified-clearance maps

struct CertifiedMapOptions {
  double collision_resolution = 0.1;  // the planner's sampling step
  double cell = 0.05;                 // map resolution
  double sigma_step = 0.05;           // cost spacing of reference samples
  std::size_t probe_directions = 64;
  std::size_t probe_levels = 8;
};

struct CertifiedMap {
  OccupancyGrid grid;
  std::vector<Trajectory> sigma;
  std::vector<State> sigma_samples;
  double delta = 0.0;
  std::size_t probe_trajectories = 0;
  bool verified = false;
};

namespace bench_detail {

/// A cost window [lo, hi] of a trajectory that must lie in free space.
struct Piece {
  Trajectory traj;
  double lo = 0.0;
  double hi = 0.0;
};

/// Reachable pieces around one reference state: every steering connection
/// to or from a tiled vertex with cost <= delta, the probe fan, and edge
/// continuations within the remaining budget.
class Reach {
 public:
  Reach(const PrimitiveGraph& g, double delta, const CertifiedMapOptions& opt) : g_(g), delta_(delta), opt_(opt) {
    in_edges_.resize(g.vertices.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) in_edges_[g.edges[i].to].push_back(i);
  }

  /// Direct connections and probes from/to x.
  template <class Emit>
  void around(const State& x, Emit&& emit) {
    const System& sys = g_.system;
    const TileCoord base = g_.tiling.tile_of(x);
    int r = 0;
    if (g_.tiling.k() > 0) {
      const double reach = position_reach_bound(sys, delta_);
      for (double e : g_.tiling.tile_extent) r = std::max(r, static_cast<int>(std::ceil(reach / e)) + 1);
    }
    for (const TileCoord& o : g_.tiling.offsets_within(r)) {
      TileCoord tile{};
      for (std::size_t i = 0; i < kMaxSpatialDims; ++i) tile[i] = base[i] + o[i];
      for (std::size_t v = 0; v < g_.vertices.size(); ++v) {
        const State w = g_.world_state(v, tile);
        const GraphNode node{static_cast<std::int32_t>(v), tile};
        if (steer_cost_lower_bound(sys, x, w) <= delta_) {
          Trajectory t = steer(sys, x, w);
          if (t.cost <= delta_) {
            raise(forward_budget_, node, delta_ - t.cost);
            emit(Piece{std::move(t), 0.0, std::numeric_limits<double>::infinity()});
          }
        }
        if (steer_cost_lower_bound(sys, w, x) <= delta_) {
          Trajectory t = steer(sys, w, x);
          if (t.cost <= delta_) {
            raise(backward_budget_, node, delta_ - t.cost);
            emit(Piece{std::move(t), 0.0, std::numeric_limits<double>::infinity()});
          }
        }
      }
    }
    const double reach = position_reach_bound(sys, delta_);
    for (std::size_t a = 0; a < opt_.probe_directions; ++a) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(opt_.probe_directions);
      for (std::size_t l = 1; l <= opt_.probe_levels; ++l) {
        const double rr = reach * static_cast<double>(l) / static_cast<double>(opt_.probe_levels);
        State y = x;
        y[0] += rr * std::cos(phi);
        y[1] += rr * std::sin(phi);
        if (is_reeds_shepp(sys)) {
          y[2] = wrap_angle(phi);
        } else {
          y[2] = 0.0;
          y[3] = 0.0;
        }
        Trajectory f = steer(sys, x, y);
        emit(Piece{f, 0.0, delta_});
        Trajectory bwd = steer(sys, y, x);
        const double c = bwd.cost;
        emit(Piece{std::move(bwd), c - delta_, c});
        probes_ += 2;
      }
    }
  }

  /// Out-edge prefixes and in-edge suffixes within each node's budget.
  template <class Emit>
  void continuations(Emit&& emit) const {
    for (const auto& [node, budget] : forward_budget_) {
      for (const Edge& e : g_.out_edges(static_cast<std::size_t>(node.vertex))) {
        emit(Piece{world_trajectory(g_, node, e), 0.0, budget});
      }
    }
    for (const auto& [node, budget] : backward_budget_) {
      for (std::size_t idx : in_edges_[static_cast<std::size_t>(node.vertex)]) {
        const Edge& e = g_.edges[idx];
        GraphNode from{static_cast<std::int32_t>(e.from), node.tile};
        for (std::size_t i = 0; i < kMaxSpatialDims; ++i) from.tile[i] -= e.offset[i];
        emit(Piece{world_trajectory(g_, from, e), e.cost - budget, e.cost});
      }
    }
  }

  std::size_t probes() const { return probes_; }

 private:
  static void raise(std::map<GraphNode, double>& m, const GraphNode& n, double b) {
    auto [it, inserted] = m.emplace(n, b);
    if (!inserted) it->second = std::max(it->second, b);
  }

  const PrimitiveGraph& g_;
  double delta_;
  CertifiedMapOptions opt_;
  std::vector<std::vector<std::size_t>> in_edges_;
  std::map<GraphNode, double> forward_budget_;
  std::map<GraphNode, double> backward_budget_;
  std::size_t probes_ = 0;
};

/// Sample points of a piece: the planner's own samples whose accumulated
/// cost falls in the window, plus a finer pass over the same window.
template <class F>
void piece_points(const Piece& p, double resolution, F&& f) {
  const Trajectory& t = p.traj;
  if (t.cost <= 0.0) {
    f(t.start);
    return;
  }
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t.cost / resolution)));
  for (std::size_t k = 0; k <= n; ++k) {
    const double c = t.cost * static_cast<double>(k) / static_cast<double>(n);
    if (c < p.lo || c > p.hi) continue;
    if (k == 0) {
      f(t.start);
    } else if (k == n) {
      f(t.end);
    } else {
      f(t.at(t.time_at_cost(c)));
    }
  }
  const double lo = std::max(0.0, p.lo), hi = std::min(t.cost, p.hi);
  if (hi <= lo) return;
  const auto m = static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * resolution)));
  for (std::size_t k = 0; k <= m; ++k) {
    const double c = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m);
    f(t.at(t.time_at_cost(c)));
  }
}

}  // namespace bench_detail

/// Builds a map whose free space is the union of sampled reachable sets of
/// cost <= delta around the reference motion through the waypoints; every
/// other cell of the enclosing grid is occupied. A verification pass then
/// re-checks every recorded piece against the rasterized grid.
inline CertifiedMap certified_clearance_map(const PrimitiveGraph& g, const CertifiedClearance& spec,
                                            const CertifiedMapOptions& opt = {}) {
  if (!(spec.delta > 0.0)) throw ConfigError("certified map: delta must be positive");
  if (spec.waypoints.size() < 2) throw ConfigError("certified map: need at least two waypoints");
  if (!(opt.collision_resolution > 0.0) || !(opt.cell > 0.0) || !(opt.sigma_step > 0.0)) {
    throw ConfigError("certified map: resolutions must be positive");
  }
  CertifiedMap out;
  out.delta = spec.delta;
  const System& sys = g.system;
  for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
    try {
      out.sigma.push_back(steer(sys, spec.waypoints[i], spec.waypoints[i + 1]));
    } catch (const Error& e) {
      throw ConfigError(std::string("certified map: waypoint steering failed: ") + e.what());
    }
  }
  for (std::size_t i = 0; i < out.sigma.size(); ++i) {
    auto pts = sample_trajectory(out.sigma[i], opt.sigma_step);
    out.sigma_samples.insert(out.sigma_samples.end(), pts.begin() + (i == 0 ? 0 : 1), pts.end());
  }

  std::vector<std::array<double, 2>> points;
  std::vector<bench_detail::Piece> pieces;
  bench_detail::Reach reach(g, spec.delta, opt);
  auto collect = [&](bench_detail::Piece&& p) {
    bench_detail::piece_points(p, opt.collision_resolution, [&](const State& s) { points.push_back({s[0], s[1]}); });
    pieces.push_back(std::move(p));
  };
  for (const State& x : out.sigma_samples) reach.around(x, collect);
  reach.continuations(collect);
  out.probe_trajectories = reach.probes();

  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& p : points) {
    x0 = std::min(x0, p[0]);
    y0 = std::min(y0, p[1]);
    x1 = std::max(x1, p[0]);
    y1 = std::max(y1, p[1]);
  }
  // The occupied rim must be wider than any gap between consecutive samples.
  const auto rim = static_cast<std::size_t>(std::ceil(position_reach_bound(sys, opt.collision_resolution) / opt.cell)) + 3;
  const double pad = static_cast<double>(rim) * opt.cell;
  const std::array<double, 2> origin{std::floor((x0 - pad) / opt.cell) * opt.cell, std::floor((y0 - pad) / opt.cell) * opt.cell};
  const auto w = static_cast<std::size_t>(std::ceil((x1 + pad - origin[0]) / opt.cell)) + 1;
  const auto h = static_cast<std::size_t>(std::ceil((y1 + pad - origin[1]) / opt.cell)) + 1;
  OccupancyGrid grid(w, h, opt.cell, origin);
  std::fill(grid.cells.begin(), grid.cells.end(), std::uint8_t{1});
  for (const auto& p : points) {
    if (auto c = grid.cell_of(p[0], p[1])) grid.set(c->first, c->second, false);
  }

  out.verified = true;
  for (const auto& p : pieces) {
    bench_detail::piece_points(p, opt.collision_resolution, [&](const State& s) {
      if (grid.occupied_at(s[0], s[1])) out.verified = false;
    });
  }
  out.grid = std::move(grid);
  return out;
}

/// Map from a spec. Certified maps need the graph whose vertices anchor the
/// reachable-set probes.
inline OccupancyGrid generate_map(const MapSpec& spec, const PrimitiveGraph* graph = nullptr,
                                  const CertifiedMapOptions& opt = {}) {
  if (std::holds_alternative<RandomCorridors>(spec.style)) return random_corridors_map(spec);
  if (graph == nullptr) throw ConfigError("map: certified_clearance needs a primitive graph");
  CertifiedMapOptions o = opt;
  o.cell = spec.resolution;
  return certified_clearance_map(*graph, std::get<CertifiedClearance>(spec.style), o).grid;
}

// ---------------------------------------------------------------------------
// Sweeps

struct QueryTemplate {
  double goal_cost_tolerance = kUnset;   // graphs: own dispersion; baselines: largest graph dispersion
  double collision_resolution = kUnset;  // all methods: smallest graph dispersion / 10
  std::size_t max_collision_checks = 100000;
  HeuristicKind heuristic = HeuristicKind::Zero;
  SnapResolution snap{};
};

struct ExperimentRecord {
  std::string map_id;
  std::string method_id;
  PlanStatus status = PlanStatus::NoPath;
  double total_cost = std::numeric_limits<double>::quiet_NaN();
  std::size_t collision_checks = 0;
  std::size_t expansions = 0;
  double wall_time = 0.0;
};

struct MethodAggregate {
  std::string method_id;
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t budget_exhausted = 0;
  double mean_collision_checks = 0.0;
  double mean_cost = std::numeric_limits<double>::quiet_NaN();  // over successes
};

inline std::string fmt_num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string graph_method_id(const PrimitiveGraph& g) { return "dispersion_" + fmt_num(g.dispersion); }

inline std::string baseline_method_id(const UniformInputSpec& s) {
  return "uniform_T" + fmt_num(s.duration) + "_b" + std::to_string(s.branching_per_dim);
}

inline std::string map_id(const MapSpec& m) { return "map_" + std::to_string(m.seed); }

/// Start/goal pair at the map's corridor endpoints, at rest.
inline std::pair<State, State> corner_query(const MapSpec& m, const System& sys) {
  const auto ends = corridor_endpoints(m);
  if (is_reeds_shepp(sys)) return {State::se2(ends[0][0], ends[0][1], 0.0), State::se2(ends[1][0], ends[1][1], 0.0)};
  return {State::planar(ends[0][0], ends[0][1], 0.0, 0.0), State::planar(ends[1][0], ends[1][1], 0.0, 0.0)};
}

/// Every (method, map) pair under the same start/goal and budget. Records
/// are ordered by method (graphs first, then baselines) and then by map.
inline std::vector<ExperimentRecord> run_sweep(const std::vector<PrimitiveGraph>& graphs,
                                               const std::vector<UniformInputSpec>& baselines,
                                               const std::vector<MapSpec>& maps, const QueryTemplate& tmpl,
                                               std::size_t threads = 1) {
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (const auto& g : graphs) {
    dmin = std::min(dmin, g.dispersion);
    dmax = std::max(dmax, g.dispersion);
  }
  const double res = std::isnan(tmpl.collision_resolution) ? dmin / 10.0 : tmpl.collision_resolution;
  const double base_tol = std::isnan(tmpl.goal_cost_tolerance) ? dmax : tmpl.goal_cost_tolerance;
  const std::size_t methods = graphs.size() + baselines.size();
  if (methods > 0 && !(res > 0.0 && std::isfinite(res))) {
    throw ConfigError("sweep: collision_resolution must be set when no graph fixes it");
  }

  std::vector<OccupancyGrid> grids(maps.size());
  parallel_for(maps.size(), threads, [&](std::size_t i) { grids[i] = random_corridors_map(maps[i]); });

  std::vector<ExperimentRecord> out(methods * maps.size());
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const std::size_t m = idx / maps.size(), k = idx % maps.size();
    ExperimentRecord rec;
    rec.map_id = map_id(maps[k]);
    const auto start_time = std::chrono::steady_clock::now();
    PlanResult r;
    if (m < graphs.size()) {
      const PrimitiveGraph& g = graphs[m];
      rec.method_id = graph_method_id(g);
      PlanQuery q;
      std::tie(q.start, q.goal) = corner_query(maps[k], g.system);
      q.goal_cost_tolerance = std::isnan(tmpl.goal_cost_tolerance) ? g.dispersion : tmpl.goal_cost_tolerance;
      q.collision_resolution = res;
      q.max_collision_checks = tmpl.max_collision_checks;
      q.heuristic = tmpl.heuristic;
      r = plan(g, grids[k], q);
    } else {
      const UniformInputSpec& b = baselines[m - graphs.size()];
      rec.method_id = baseline_method_id(b);
      PlanQuery q;
      std::tie(q.start, q.goal) = corner_query(maps[k], System{b.system});
      q.goal_cost_tolerance = base_tol;
      q.collision_resolution = res;
      q.max_collision_checks = tmpl.max_collision_checks;
      q.heuristic = tmpl.heuristic;
      r = plan_baseline(b, tmpl.snap, grids[k], q);
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    rec.status = r.status;
    if (r.status == PlanStatus::Success) rec.total_cost = r.total_cost;
    rec.collision_checks = r.collision_checks;
    rec.expansions = r.expansions;
    out[idx] = std::move(rec);
  });
  return out;
}

/// Per-method means in first-appearance order.
inline std::vector<MethodAggregate> aggregate(const std::vector<ExperimentRecord>& records) {
  std::vector<MethodAggregate> out;
  std::map<std::string, std::size_t> index;
  std::vector<double> cost_sum;
  std::vector<double> check_sum;
  for (const auto& r : records) {
    auto [it, inserted] = index.emplace(r.method_id, out.size());
    if (inserted) {
      out.push_back(MethodAggregate{r.method_id});
      cost_sum.push_back(0.0);
      check_sum.push_back(0.0);
    }
    const std::size_t i = it->second;
    MethodAggregate& a = out[i];
    ++a.runs;
    check_sum[i] += static_cast<double>(r.collision_checks);
    if (r.status == PlanStatus::Success) {
      ++a.successes;
      cost_sum[i] += r.total_cost;
    }
    if (r.status == PlanStatus::BudgetExhausted) ++a.budget_exhausted;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_collision_checks = check_sum[i] / static_cast<double>(out[i].runs);
    if (out[i].successes > 0) out[i].mean_cost = cost_sum[i] / static_cast<double>(out[i].successes);
  }
  return out;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// Header lines start with '#' and carry the seeds and settings of the run.
inline void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records,
                              const std::vector<std::string>& header_lines = {}) {
  for (const auto& h : header_lines) os << "# " << h << '\n';
  os << "map_id,method_id,status,total_cost,collision_checks,expansions,wall_time\n";
  for (const auto& r : records) {
    os << r.map_id << ',' << r.method_id << ',' << to_string(r.status) << ',' << csv_number(r.total_cost) << ','
       << r.collision_checks << ',' << r.expansions << ',' << csv_number(r.wall_time) << '\n';
  }
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<MethodAggregate>& agg,
                                const std::vector<std::string>& header_lines = {}) {
  for (const auto& h : header_lines) os << "# " << h << '\n';
  os << "method_id,runs,successes,budget_exhausted,mean_collision_checks,mean_cost\n";
  for (const auto& a : agg) {
    os << a.method_id << ',' << a.runs << ',' << a.successes << ',' << a.budget_exhausted << ','
       << csv_number(a.mean_collision_checks) << ',' << csv_number(a.mean_cost) << '\n';
  }
}

/// Fixed-width table: one row per method, checks then cost, with
/// ">budget" and "N/A" for methods that ran out of budget.
inline std::string render_table(const std::vector<MethodAggregate>& agg, std::size_t budget) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "method" << std::right << std::setw(10) << "success" << std::setw(22)
     << "avg collision checks" << std::setw(14) << "avg cost" << '\n';
  for (const auto& a : agg) {
    std::string checks = fmt_num(a.mean_collision_checks, 6);
    if (a.budget_exhausted > 0) checks = ">" + std::to_string(budget);
    const std::string cost = a.successes == a.runs && a.runs > 0 ? fmt_num(a.mean_cost, 6) : "N/A";
    os << std::left << std::setw(28) << a.method_id << std::right << std::setw(10)
       << (std::to_string(a.successes) + "/" + std::to_string(a.runs)) << std::setw(22) << checks << std::setw(14)
       << cost << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Completeness trials

struct TrialOptions {
  std::size_t waypoints = 3;
  double workspace = 6.0;  // waypoint positions uniform in [0, workspace]^2
  double collision_resolution = kUnset;  // unset: dispersion / 10
  std::size_t max_collision_checks = 100000;
  std::size_t threads = 1;
  CertifiedMapOptions map{};
};

struct TrialOutcome {
  PlanStatus status = PlanStatus::NoPath;
  std::size_t collision_checks = 0;
  bool map_verified = false;
  double total_cost = std::numeric_limits<double>::quiet_NaN();
};

struct TrialReport {
  double success_fraction = 0.0;
  std::vector<TrialOutcome> outcomes;
};

inline std::vector<State> random_waypoints(const System& sys, std::size_t n, double extent, Rng& rng) {
  std::vector<State> w;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, extent), y = rng.uniform(0.0, extent);
    if (is_reeds_shepp(sys)) {
      w.push_back(State::se2(x, y, rng.uniform(-std::numbers::pi, std::numbers::pi)));
    } else {
      const double v = 0.5 * std::get<DoubleIntegratorSystem>(sys).params.v_max;
      w.push_back(State::planar(x, y, rng.uniform(-v, v), rng.uniform(-v, v)));
    }
  }
  return w;
}

/// Plans on `trials` certified maps of clearance delta around random
/// waypoint chains. An infinite delta plans on an empty map instead.
inline TrialReport completeness_trial(const PrimitiveGraph& graph, double delta, std::size_t trials, std::uint64_t seed,
                                      const TrialOptions& opt = {}) {
  if (!(delta > 0.0)) throw ConfigError("completeness trial: delta must be positive");
  const double res = std::isnan(opt.collision_resolution) ? graph.dispersion / 10.0 : opt.collision_resolution;
  TrialReport rep;
  rep.outcomes.resize(trials);
  std::vector<std::vector<State>> chains(trials);
  Rng rng(seed);
  for (auto& c : chains) c = random_waypoints(graph.system, std::max<std::size_t>(2, opt.waypoints), opt.workspace, rng);

  parallel_for(trials, opt.threads, [&](std::size_t i) {
    TrialOutcome& o = rep.outcomes[i];
    OccupancyGrid grid;
    if (std::isinf(delta)) {
      grid = OccupancyGrid(1, 1, 1.0, {1e9, 1e9});
      o.map_verified = true;
    } else {
      CertifiedMapOptions mo = opt.map;
      mo.collision_resolution = res;
      CertifiedMap cm = certified_clearance_map(graph, CertifiedClearance{delta, chains[i]}, mo);
      o.map_verified = cm.verified;
      grid = std::move(cm.grid);
    }
    PlanQuery q;
    q.start = chains[i].front();
    q.goal = chains[i].back();
    q.collision_resolution = res;
    q.max_collision_checks = opt.max_collision_checks;
    const PlanResult r = plan(graph, grid, q);
    o.status = r.status;
    o.collision_checks = r.collision_checks;
    if (r.status == PlanStatus::Success) o.total_cost = r.total_cost;
  });
  std::size_t ok = 0;
  for (const auto& o : rep.outcomes) ok += o.status == PlanStatus::Success;
  rep.success_fraction = trials == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials);
  return rep;
}

}  // namespace mdmp
