#pragma once

// Comparison method: constant inputs from a uniform lattice over [-u_max,
// u_max]^2, applied for a fixed duration from any state. No precomputed
// vertex set; duplicate states are merged by snapping to a grid.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mdmp/core.hpp"
#include "mdmp/planner.hpp"
#include "mdmp/systems.hpp"

namespace mdmp {

struct UniformInputSpec {
  std::size_t branching_per_dim = 3;
  double duration = 0.3;
  double u_max = 1.0;
  DoubleIntegratorSystem system{};

  void validate() const {
    if (branching_per_dim < 2) throw ConfigError("baseline: branching_per_dim must be >= 2");
    if (!(duration > 0.0)) throw ConfigError("baseline: duration must be positive");
    if (!(u_max > 0.0)) throw ConfigError("baseline: u_max must be positive");
    mdmp::validate(System{system});
  }
};

using Input2 = std::array<double, 2>;

/// Cartesian product of evenly spaced values on [-u_max, u_max] per axis,
/// first axis outermost.
inline std::vector<Input2> input_lattice(const UniformInputSpec& spec) {
  spec.validate();
  const std::size_t b = spec.branching_per_dim;
  std::vector<double> values(b);
  for (std::size_t i = 0; i < b; ++i) {
    values[i] = -spec.u_max + 2.0 * spec.u_max * static_cast<double>(i) / static_cast<double>(b - 1);
  }
  if (b % 2 == 1) values[b / 2] = 0.0;
  std::vector<Input2> out;
  out.reserve(b * b);
  for (double ux : values) {
    for (double uy : values) out.push_back({ux, uy});
  }
  return out;
}

struct Rollout {
  Trajectory traj;
  bool feasible = true;
};

/// Closed-form constant-input rollout. Cost is (|u|^2 + rho) * duration.
/// Infeasible when the end velocity leaves the v_max box (velocity is linear,
/// so the endpoints bound it).
inline Rollout forward_simulate(const State& x, const Input2& u, double duration, const di::Params& p) {
  Rollout r;
  Trajectory& t = r.traj;
  t.system = DoubleIntegratorSystem{p};
  t.start = x;
  t.duration = duration;
  di::Cubic2 axes{};
  State end(4);
  for (std::size_t ax = 0; ax < 2; ++ax) {
    axes[ax] = di::AxisCubic{x[ax + 2], 0.5 * u[ax], 0.0};
    end[ax] = x[ax] + axes[ax].displacement(duration);
    end[ax + 2] = x[ax + 2] + u[ax] * duration;
    if (std::abs(end[ax + 2]) > p.v_max + 1e-9) r.feasible = false;
  }
  t.shape = axes;
  t.end = end;
  t.cost = (u[0] * u[0] + u[1] * u[1] + p.rho) * duration;
  return r;
}

struct BaselineSuccessor {
  State state;
  double cost = 0.0;
  Trajectory traj;
};

/// One successor per feasible lattice input.
inline std::vector<BaselineSuccessor> baseline_expand(const State& x, const UniformInputSpec& spec) {
  std::vector<BaselineSuccessor> out;
  for (const Input2& u : input_lattice(spec)) {
    Rollout r = forward_simulate(x, u, spec.duration, spec.system.params);
    if (r.feasible) out.push_back({r.traj.end, r.traj.cost, std::move(r.traj)});
  }
  return out;
}

/// Grid used to merge baseline states: positions snap to `position` cells and
/// velocities to `velocity` cells.
struct SnapResolution {
  double position = 0.05;
  double velocity = 0.05;
};

struct BaselineNode {
  State state{};
};

/// The baseline as a search space for best_first_search.
class BaselineSpace {
 public:
  using Node = BaselineNode;
  using Key = std::array<std::int64_t, 4>;
  using Ref = std::uint32_t;

  BaselineSpace(const UniformInputSpec& spec, SnapResolution snap)
      : spec_(spec), snap_(snap), system_(spec.system), inputs_(input_lattice(spec)) {
    if (!(snap.position > 0.0) || !(snap.velocity > 0.0)) throw ConfigError("baseline: snap resolution must be positive");
  }

  const System& system() const { return system_; }
  double nominal_dispersion() const { return std::numeric_limits<double>::quiet_NaN(); }
  const UniformInputSpec& spec() const { return spec_; }
  SnapResolution snap() const { return snap_; }

  Key key(const Node& n) const {
    const State& s = n.state;
    return {static_cast<std::int64_t>(std::floor(s[0] / snap_.position)),
            static_cast<std::int64_t>(std::floor(s[1] / snap_.position)),
            static_cast<std::int64_t>(std::floor(s[2] / snap_.velocity)),
            static_cast<std::int64_t>(std::floor(s[3] / snap_.velocity))};
  }
  State state(const Node& n) const { return n.state; }
  Node root(const State& start) const { return {start}; }

  void root_successors(const State& start, std::vector<ExplicitSuccessor<Node>>& out) const {
    for (const Input2& u : inputs_) {
      Rollout r = forward_simulate(start, u, spec_.duration, spec_.system.params);
      if (r.feasible) {
        const State end = r.traj.end;
        out.push_back({Node{end}, std::move(r.traj)});
      }
    }
  }

  void successors(const Node& n, std::vector<Successor<Node, Ref>>& out) const {
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      const Rollout r = forward_simulate(n.state, inputs_[i], spec_.duration, spec_.system.params);
      if (r.feasible) out.push_back({Node{r.traj.end}, r.traj.cost, static_cast<Ref>(i)});
    }
  }

  Trajectory trajectory(const Node& from, Ref ref) const {
    return forward_simulate(from.state, inputs_[ref], spec_.duration, spec_.system.params).traj;
  }

 private:
  UniformInputSpec spec_;
  SnapResolution snap_;
  System system_;
  std::vector<Input2> inputs_;
};

inline PlanResult plan_baseline(const UniformInputSpec& spec, SnapResolution snap, const OccupancyGrid& grid,
                                const PlanQuery& query) {
  if (std::isnan(query.goal_cost_tolerance) || std::isnan(query.collision_resolution)) {
    throw ConfigError("baseline plan: goal_cost_tolerance and collision_resolution must be set");
  }
  return best_first_search(BaselineSpace(spec, snap), grid, query);
}

}  // namespace mdmp
