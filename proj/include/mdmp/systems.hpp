#pragma once

// The two supported dynamical systems behind one value-semantic interface:
// steering (optimal free-space boundary-value solution), the symmetrized
// quasimetric, and trajectory sampling by accumulated cost.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mdmp/core.hpp"
#include "mdmp/double_integrator.hpp"
#include "mdmp/reeds_shepp.hpp"

namespace mdmp {

struct ReedsSheppSystem {
  double turning_radius = 1.0;
  friend bool operator==(const ReedsSheppSystem&, const ReedsSheppSystem&) = default;
};

struct DoubleIntegratorSystem {
  di::Params params{};
  friend bool operator==(const DoubleIntegratorSystem&, const DoubleIntegratorSystem&) = default;
};

using System = std::variant<ReedsSheppSystem, DoubleIntegratorSystem>;

inline bool is_reeds_shepp(const System& s) { return std::holds_alternative<ReedsSheppSystem>(s); }

inline std::size_t state_dim(const System& s) { return is_reeds_shepp(s) ? 3 : 4; }

inline std::string system_name(const System& s) { return is_reeds_shepp(s) ? "reeds_shepp" : "double_integrator"; }

inline void validate(const System& s) {
  if (const auto* rs = std::get_if<ReedsSheppSystem>(&s)) {
    if (!(rs->turning_radius > 0.0)) throw ConfigError("turning_radius must be positive");
  } else {
    const auto& p = std::get<DoubleIntegratorSystem>(s).params;
    if (!(p.rho > 0.0)) throw ConfigError("rho must be positive");
    if (!(p.u_max > 0.0)) throw ConfigError("u_max must be positive");
    if (!(p.v_max > 0.0)) throw ConfigError("v_max must be positive");
  }
}

/// Zero state of the system's state space.
inline State zero_state(const System& s) { return State(state_dim(s)); }

/// Canonical form of a state: headings wrapped into [-pi, pi).
inline State canonical(const System& s, State x) {
  if (is_reeds_shepp(s)) x[2] = wrap_angle(x[2]);
  return x;
}

/// Feasible motion between two states. For the car the duration is the arc
/// length (unit speed); for the double integrator it is time.
struct Trajectory {
  System system{};
  State start{};
  State end{};
  double cost = 0.0;
  double duration = 0.0;
  std::variant<rs::Path, di::Cubic2> shape{};

  /// State at parameter t in [0, duration].
  State at(double t) const {
    t = std::clamp(t, 0.0, duration);
    if (const auto* rs = std::get_if<ReedsSheppSystem>(&system)) {
      return rs::interpolate(start, std::get<rs::Path>(shape), rs->turning_radius, t);
    }
    const auto& axes = std::get<di::Cubic2>(shape);
    return State::planar(start[0] + axes[0].displacement(t), start[1] + axes[1].displacement(t), axes[0].velocity(t),
                         axes[1].velocity(t));
  }

  /// Running cost accumulated over [0, t].
  double cost_until(double t) const {
    t = std::clamp(t, 0.0, duration);
    if (is_reeds_shepp(system)) return t;
    const auto& p = std::get<DoubleIntegratorSystem>(system).params;
    return di::accumulated_cost(std::get<di::Cubic2>(shape), p.rho, t);
  }

  /// Parameter at which the accumulated cost first reaches c.
  double time_at_cost(double c) const {
    if (c <= 0.0) return 0.0;
    if (c >= cost) return duration;
    if (is_reeds_shepp(system)) return c;
    double lo = 0.0, hi = duration;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * duration; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (cost_until(mid) < c) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  /// Same motion re-anchored at translated endpoints. Both endpoints must
  /// differ from the stored ones by the same spatial offset.
  Trajectory reanchored(const State& new_start, const State& new_end) const {
    Trajectory t = *this;
    t.start = new_start;
    t.end = new_end;
    return t;
  }
};

/// Optimal free-space steering between two states.
inline Trajectory steer(const System& system, const State& from, const State& to) {
  Trajectory t;
  t.system = system;
  t.start = from;
  t.end = to;
  if (const auto* rs = std::get_if<ReedsSheppSystem>(&system)) {
    rs::Path path = rs::shortest_path(from, to, rs->turning_radius);
    t.cost = path.length();
    t.duration = t.cost;
    t.shape = path;
  } else {
    const auto& p = std::get<DoubleIntegratorSystem>(system).params;
    const di::SteerSolution sol = di::steer(from, to, p);
    t.cost = sol.cost;
    t.duration = sol.duration;
    t.shape = sol.axes;
  }
  return t;
}

/// Optimal steering cost only.
inline double steer_cost(const System& system, const State& from, const State& to) {
  if (const auto* rs = std::get_if<ReedsSheppSystem>(&system)) {
    return rs::shortest_path(from, to, rs->turning_radius).length();
  }
  return di::steer(from, to, std::get<DoubleIntegratorSystem>(system).params).cost;
}

struct CostPair {
  double forward = 0.0;
  double backward = 0.0;
  double max = 0.0;
};

inline CostPair quasimetric(const State& a, const State& b, const System& system) {
  CostPair c;
  c.forward = steer_cost(system, a, b);
  c.backward = steer_cost(system, b, a);
  c.max = std::max(c.forward, c.backward);
  return c;
}

/// States along the trajectory whose consecutive accumulated costs differ by
/// at most `resolution`. Both endpoints are included exactly.
inline std::vector<State> sample_trajectory(const Trajectory& t, double resolution) {
  if (!(resolution > 0.0)) throw DomainError("sample_trajectory: resolution must be positive");
  std::vector<State> out;
  if (t.cost <= 0.0 || t.duration <= 0.0) {
    out.push_back(t.start);
    return out;
  }
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t.cost / resolution)));
  out.reserve(n + 1);
  out.push_back(t.start);
  for (std::size_t k = 1; k < n; ++k) {
    const double c = t.cost * static_cast<double>(k) / static_cast<double>(n);
    out.push_back(t.at(t.time_at_cost(c)));
  }
  out.push_back(t.end);
  return out;
}

/// Cheap lower bound on steer_cost(from, to), used to skip steering calls
/// that cannot improve a running minimum.
inline double steer_cost_lower_bound(const System& s, const State& from, const State& to) {
  const double dx = to[0] - from[0];
  const double dy = to[1] - from[1];
  if (is_reeds_shepp(s)) return std::sqrt(dx * dx + dy * dy) * (1.0 - 1e-9);
  const auto& p = std::get<DoubleIntegratorSystem>(s).params;
  return p.rho * std::max(std::abs(dx), std::abs(dy)) / p.v_max * (1.0 - 1e-6);
}

/// Upper bound on the planar displacement of any trajectory of cost <= c.
inline double position_reach_bound(const System& s, double c) {
  if (is_reeds_shepp(s)) return c;
  const auto& p = std::get<DoubleIntegratorSystem>(s).params;
  return std::sqrt(2.0) * p.v_max * c / p.rho;
}

}  // namespace mdmp
