#pragma once

// Planar double integrator (position + velocity, acceleration input) with
// running cost |u|^2 plus a constant rate rho per unit time. Steering is
// bi-level: for a fixed duration the minimum-effort boundary-value problem is
// solved in closed form per axis, and an outer derivative-free line search
// picks the duration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "mdmp/core.hpp"

namespace mdmp::di {

struct Params {
  double rho = 1.0;    // cost per second
  double u_max = 1.0;  // acceleration bound per axis
  double v_max = 1.0;  // speed bound per axis

  friend bool operator==(const Params&, const Params&) = default;
};

/// Displacement of one axis relative to the start position:
/// p(t) - p(0) = c1 t + c2 t^2 + c3 t^3.
struct AxisCubic {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  double displacement(double t) const { return t * (c1 + t * (c2 + t * c3)); }
  double velocity(double t) const { return c1 + t * (2.0 * c2 + 3.0 * t * c3); }
  double acceleration(double t) const { return 2.0 * c2 + 6.0 * c3 * t; }

  friend bool operator==(const AxisCubic&, const AxisCubic&) = default;
};

using Cubic2 = std::array<AxisCubic, 2>;

struct InnerSolution {
  double effort = 0.0;
  Cubic2 axes{};
};

/// Minimum of the integral of |u|^2 over [0, T] subject to both full-state
/// boundary conditions. The axes decouple; each has a cubic position profile.
inline InnerSolution inner_effort(const State& from, const State& to, double duration) {
  if (!(duration > 0.0)) throw DomainError("inner_effort: duration must be positive");
  InnerSolution out;
  const double t = duration;
  for (std::size_t ax = 0; ax < 2; ++ax) {
    const double p0 = from[ax], v0 = from[ax + 2];
    const double p1 = to[ax], v1 = to[ax + 2];
    const double dp = p1 - p0 - v0 * t;
    const double dv = v1 - v0;
    // Costate from the inverse controllability Gramian.
    const double lp = 12.0 * dp / (t * t * t) - 6.0 * dv / (t * t);
    const double lv = -6.0 * dp / (t * t) + 4.0 * dv / t;
    out.effort += dp * lp + dv * lv;
    const double a0 = lp * t + lv;
    out.axes[ax] = AxisCubic{v0, 0.5 * a0, -lp / 6.0};
  }
  return out;
}

/// Whether the cubic profiles keep |a| <= u_max and |v| <= v_max on [0, T].
inline bool within_limits(const Cubic2& axes, double duration, const Params& p) {
  const double atol = p.u_max + 1e-9;
  const double vtol = p.v_max + 1e-9;
  for (const AxisCubic& a : axes) {
    if (std::abs(a.acceleration(0.0)) > atol || std::abs(a.acceleration(duration)) > atol) return false;
    if (std::abs(a.velocity(0.0)) > vtol || std::abs(a.velocity(duration)) > vtol) return false;
    if (a.c3 != 0.0) {
      const double ts = -a.c2 / (3.0 * a.c3);
      if (ts > 0.0 && ts < duration && std::abs(a.velocity(ts)) > vtol) return false;
    }
  }
  return true;
}

inline double objective(const State& from, const State& to, double duration, const Params& p) {
  return inner_effort(from, to, duration).effort + p.rho * duration;
}

/// Golden-section minimization of f on [lo, hi] until the bracket is narrower
/// than rel_tol times its midpoint.
template <class F>
double golden_section(F&& f, double lo, double hi, double rel_tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > rel_tol * 0.5 * (a + b); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

struct SteerSolution {
  double duration = 0.0;
  double cost = 0.0;
  Cubic2 axes{};
  bool constrained = false;  // duration was inflated to satisfy the limits
};

inline constexpr std::size_t kMaxGrid = 256;

struct SteerOptions {
  double t_lo = 1e-3;
  double t_hi = 60.0;
  double t_cap = 600.0;
  double rel_tol = 1e-8;
  std::size_t grid = 48;
};

/// Optimal duration for the unconstrained bi-level problem. A log-spaced scan
/// over the bracket locates every local minimum of effort(T) + rho T; each is
/// refined by golden section and the best is returned.
inline double unconstrained_duration(const State& from, const State& to, const Params& p,
                                     const SteerOptions& opt = {}) {
  auto f = [&](double t) { return objective(from, to, t, p); };
  double lo = opt.t_lo, hi = opt.t_hi;
  if (opt.grid < 3 || opt.grid > kMaxGrid) throw DomainError("double integrator: grid size out of range");
  std::array<double, kMaxGrid> ts{}, fs{};
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double ratio = std::log(hi / lo) / static_cast<double>(opt.grid - 1);
    for (std::size_t i = 0; i < opt.grid; ++i) {
      ts[i] = lo * std::exp(ratio * static_cast<double>(i));
      fs[i] = f(ts[i]);
    }
    const auto it = std::min_element(fs.begin(), fs.begin() + static_cast<std::ptrdiff_t>(opt.grid));
    const std::size_t k = static_cast<std::size_t>(it - fs.begin());
    if (k == opt.grid - 1) {
      if (hi >= opt.t_cap) throw UnreachableError("double integrator: no minimum below the duration cap");
      hi = std::min(hi * 2.0, opt.t_cap);
      continue;
    }
    if (k == 0) {
      if (lo <= 1e-12) return lo;
      lo = std::max(lo * 1e-2, 1e-12);
      continue;
    }
    double best_t = ts[k], best_f = fs[k];
    for (std::size_t i = 1; i + 1 < opt.grid; ++i) {
      if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1]) {
        const double t = golden_section(f, ts[i - 1], ts[i + 1], opt.rel_tol);
        const double ft = f(t);
        if (ft < best_f) {
          best_f = ft;
          best_t = t;
        }
      }
    }
    return best_t;
  }
  throw UnreachableError("double integrator: failed to bracket the optimal duration");
}

/// Bi-level optimal steering. Boundary velocities outside the box are
/// rejected; if the unconstrained optimum breaks a limit the duration is
/// increased to the first duration at which both limits hold.
inline SteerSolution steer(const State& from, const State& to, const Params& p, const SteerOptions& opt = {}) {
  for (std::size_t i = 2; i < 4; ++i) {
    if (std::abs(from[i]) > p.v_max * (1.0 + 1e-12) || std::abs(to[i]) > p.v_max * (1.0 + 1e-12)) {
      throw DomainError("double integrator: boundary velocity outside the speed box");
    }
  }
  SteerSolution out;
  if (from == to) return out;

  double t = unconstrained_duration(from, to, p, opt);
  InnerSolution sol = inner_effort(from, to, t);
  if (!within_limits(sol.axes, t, p)) {
    out.constrained = true;
    double bad = t;
    double good = t;
    bool found = false;
    while (good < opt.t_cap) {
      good = std::min(good * 1.05, opt.t_cap);
      if (within_limits(inner_effort(from, to, good).axes, good, p)) {
        found = true;
        break;
      }
      bad = good;
    }
    if (!found) throw UnreachableError("double integrator: limits unsatisfiable below the duration cap");
    while (good - bad > 1e-10 * good) {
      const double mid = 0.5 * (bad + good);
      if (within_limits(inner_effort(from, to, mid).axes, mid, p)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    t = good;
    sol = inner_effort(from, to, t);
  }
  out.duration = t;
  out.cost = sol.effort + p.rho * t;
  out.axes = sol.axes;
  return out;
}

/// Running cost accumulated over [0, t] along the cubic profiles.
inline double accumulated_cost(const Cubic2& axes, double rho, double t) {
  // |a(s)|^2 with a(s) = alpha + beta s, integrated in closed form.
  double total = rho * t;
  for (const AxisCubic& a : axes) {
    const double alpha = 2.0 * a.c2;
    const double beta = 6.0 * a.c3;
    total += alpha * alpha * t + alpha * beta * t * t + beta * beta * t * t * t / 3.0;
  }
  return total;
}

}  // namespace mdmp::di
