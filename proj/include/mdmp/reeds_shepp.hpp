#pragma once

// Shortest paths for a car that drives forward and backward with a bounded
// turning radius. Paths are words of at most five arc/straight segments; the
// solver evaluates every canonical word family (CSC, CCC, CCCC, CCSC, CCSCC
// together with their time-flip, reflection and backward variants) and
// keeps the shortest. Segment lengths are signed: negative means reverse.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>

#include "mdmp/core.hpp"

namespace mdmp::rs {

enum class Steer : std::uint8_t { Left = 0, Right = 1, Straight = 2 };

struct Segment {
  Steer steer = Steer::Straight;
  double length = 0.0;  // signed, in world length units

  friend bool operator==(const Segment&, const Segment&) = default;
};

inline constexpr std::size_t kMaxSegments = 5;

struct Path {
  std::array<Segment, kMaxSegments> segments{};
  std::size_t count = 0;

  double length() const {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += std::abs(segments[i].length);
    return total;
  }

  friend bool operator==(const Path&, const Path&) = default;
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;
inline constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();

using enum Steer;

// Canonical words, indexed as in the classic Reeds-Shepp tables.
inline constexpr std::array<std::array<Steer, kMaxSegments>, 18> kWords{{
    {Left, Right, Left, Straight, Straight},       // 0  LRL
    {Right, Left, Right, Straight, Straight},      // 1  RLR
    {Left, Right, Left, Right, Straight},          // 2  LRLR
    {Right, Left, Right, Left, Straight},          // 3  RLRL
    {Left, Right, Straight, Left, Straight},       // 4  LRSL
    {Right, Left, Straight, Right, Straight},      // 5  RLSR
    {Left, Straight, Right, Left, Straight},       // 6  LSRL
    {Right, Straight, Left, Right, Straight},      // 7  RSLR
    {Left, Right, Straight, Right, Straight},      // 8  LRSR
    {Right, Left, Straight, Left, Straight},       // 9  RLSL
    {Right, Straight, Right, Left, Straight},      // 10 RSRL
    {Left, Straight, Left, Right, Straight},       // 11 LSLR
    {Left, Straight, Right, Straight, Straight},   // 12 LSR
    {Right, Straight, Left, Straight, Straight},   // 13 RSL
    {Left, Straight, Left, Straight, Straight},    // 14 LSL
    {Right, Straight, Right, Straight, Straight},  // 15 RSR
    {Left, Right, Straight, Left, Right},          // 16 LRSLR
    {Right, Left, Straight, Right, Left},          // 17 RLSRL
}};

inline constexpr std::array<std::size_t, 18> kWordSize{3, 3, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 3, 3, 3, 5, 5};

/// Wraps into [-pi, pi].
inline double mod2pi(double x) {
  double v = std::fmod(x, 2.0 * kPi);
  if (v < -kPi) {
    v += 2.0 * kPi;
  } else if (v > kPi) {
    v -= 2.0 * kPi;
  }
  return v;
}

inline void polar(double x, double y, double& r, double& theta) {
  r = std::sqrt(x * x + y * y);
  theta = std::atan2(y, x);
}

inline void tau_omega(double u, double v, double xi, double eta, double phi, double& tau, double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Closed-form solutions of the base words in the normalized frame (radius 1,
// start at the origin facing +x, goal at (x, y, phi)).

inline bool lp_sp_lp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) return true;
  }
  return false;
}

inline bool lp_sp_rp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1 = 0.0, u1 = 0.0;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

inline bool lp_rm_l(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1 = 0.0, theta = 0.0;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

inline bool lp_rup_lum_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rum_lum_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -kHalfPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

inline bool lp_rm_sm_lm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - kHalfPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rm_sm_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + kHalfPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rm_s_lm_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho = 0.0, theta = 0.0;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

/// Running minimum over candidate words; strict comparison keeps the first
/// candidate on ties.
struct Best {
  int word = -1;
  std::array<double, kMaxSegments> len{};
  double total = std::numeric_limits<double>::infinity();

  void consider(int w, double a, double b, double c, double d = 0.0, double e = 0.0) {
    const double l = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d) + std::abs(e);
    if (l < total) {
      total = l;
      word = w;
      len = {a, b, c, d, e};
    }
  }
};

inline void csc(double x, double y, double phi, Best& best) {
  double t = 0, u = 0, v = 0;
  if (lp_sp_lp(x, y, phi, t, u, v)) best.consider(14, t, u, v);
  if (lp_sp_lp(-x, y, -phi, t, u, v)) best.consider(14, -t, -u, -v);  // timeflip
  if (lp_sp_lp(x, -y, -phi, t, u, v)) best.consider(15, t, u, v);     // reflect
  if (lp_sp_lp(-x, -y, phi, t, u, v)) best.consider(15, -t, -u, -v);  // timeflip + reflect
  if (lp_sp_rp(x, y, phi, t, u, v)) best.consider(12, t, u, v);
  if (lp_sp_rp(-x, y, -phi, t, u, v)) best.consider(12, -t, -u, -v);
  if (lp_sp_rp(x, -y, -phi, t, u, v)) best.consider(13, t, u, v);
  if (lp_sp_rp(-x, -y, phi, t, u, v)) best.consider(13, -t, -u, -v);
}

inline void ccc(double x, double y, double phi, Best& best) {
  double t = 0, u = 0, v = 0;
  if (lp_rm_l(x, y, phi, t, u, v)) best.consider(0, t, u, v);
  if (lp_rm_l(-x, y, -phi, t, u, v)) best.consider(0, -t, -u, -v);
  if (lp_rm_l(x, -y, -phi, t, u, v)) best.consider(1, t, u, v);
  if (lp_rm_l(-x, -y, phi, t, u, v)) best.consider(1, -t, -u, -v);

  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_l(xb, yb, phi, t, u, v)) best.consider(0, v, u, t);
  if (lp_rm_l(-xb, yb, -phi, t, u, v)) best.consider(0, -v, -u, -t);
  if (lp_rm_l(xb, -yb, -phi, t, u, v)) best.consider(1, v, u, t);
  if (lp_rm_l(-xb, -yb, phi, t, u, v)) best.consider(1, -v, -u, -t);
}

inline void cccc(double x, double y, double phi, Best& best) {
  double t = 0, u = 0, v = 0;
  if (lp_rup_lum_rm(x, y, phi, t, u, v)) best.consider(2, t, u, -u, v);
  if (lp_rup_lum_rm(-x, y, -phi, t, u, v)) best.consider(2, -t, -u, u, -v);
  if (lp_rup_lum_rm(x, -y, -phi, t, u, v)) best.consider(3, t, u, -u, v);
  if (lp_rup_lum_rm(-x, -y, phi, t, u, v)) best.consider(3, -t, -u, u, -v);

  if (lp_rum_lum_rp(x, y, phi, t, u, v)) best.consider(2, t, u, u, v);
  if (lp_rum_lum_rp(-x, y, -phi, t, u, v)) best.consider(2, -t, -u, -u, -v);
  if (lp_rum_lum_rp(x, -y, -phi, t, u, v)) best.consider(3, t, u, u, v);
  if (lp_rum_lum_rp(-x, -y, phi, t, u, v)) best.consider(3, -t, -u, -u, -v);
}

inline void ccsc(double x, double y, double phi, Best& best) {
  double t = 0, u = 0, v = 0;
  if (lp_rm_sm_lm(x, y, phi, t, u, v)) best.consider(4, t, -kHalfPi, u, v);
  if (lp_rm_sm_lm(-x, y, -phi, t, u, v)) best.consider(4, -t, kHalfPi, -u, -v);
  if (lp_rm_sm_lm(x, -y, -phi, t, u, v)) best.consider(5, t, -kHalfPi, u, v);
  if (lp_rm_sm_lm(-x, -y, phi, t, u, v)) best.consider(5, -t, kHalfPi, -u, -v);

  if (lp_rm_sm_rm(x, y, phi, t, u, v)) best.consider(8, t, -kHalfPi, u, v);
  if (lp_rm_sm_rm(-x, y, -phi, t, u, v)) best.consider(8, -t, kHalfPi, -u, -v);
  if (lp_rm_sm_rm(x, -y, -phi, t, u, v)) best.consider(9, t, -kHalfPi, u, v);
  if (lp_rm_sm_rm(-x, -y, phi, t, u, v)) best.consider(9, -t, kHalfPi, -u, -v);

  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_sm_lm(xb, yb, phi, t, u, v)) best.consider(6, v, u, -kHalfPi, t);
  if (lp_rm_sm_lm(-xb, yb, -phi, t, u, v)) best.consider(6, -v, -u, kHalfPi, -t);
  if (lp_rm_sm_lm(xb, -yb, -phi, t, u, v)) best.consider(7, v, u, -kHalfPi, t);
  if (lp_rm_sm_lm(-xb, -yb, phi, t, u, v)) best.consider(7, -v, -u, kHalfPi, -t);

  if (lp_rm_sm_rm(xb, yb, phi, t, u, v)) best.consider(10, v, u, -kHalfPi, t);
  if (lp_rm_sm_rm(-xb, yb, -phi, t, u, v)) best.consider(10, -v, -u, kHalfPi, -t);
  if (lp_rm_sm_rm(xb, -yb, -phi, t, u, v)) best.consider(11, v, u, -kHalfPi, t);
  if (lp_rm_sm_rm(-xb, -yb, phi, t, u, v)) best.consider(11, -v, -u, kHalfPi, -t);
}

inline void ccscc(double x, double y, double phi, Best& best) {
  double t = 0, u = 0, v = 0;
  if (lp_rm_s_lm_rp(x, y, phi, t, u, v)) best.consider(16, t, -kHalfPi, u, -kHalfPi, v);
  if (lp_rm_s_lm_rp(-x, y, -phi, t, u, v)) best.consider(16, -t, kHalfPi, -u, kHalfPi, -v);
  if (lp_rm_s_lm_rp(x, -y, -phi, t, u, v)) best.consider(17, t, -kHalfPi, u, -kHalfPi, v);
  if (lp_rm_s_lm_rp(-x, -y, phi, t, u, v)) best.consider(17, -t, kHalfPi, -u, kHalfPi, -v);
}

}  // namespace detail

/// Shortest path in the normalized frame: unit radius, start at the origin
/// with zero heading, goal at (x, y, phi). Lengths are in radius units and
/// zero-length segments are dropped.
inline Path shortest_normalized(double x, double y, double phi) {
  detail::Best best;
  detail::csc(x, y, phi, best);
  detail::ccc(x, y, phi, best);
  detail::cccc(x, y, phi, best);
  detail::ccsc(x, y, phi, best);
  detail::ccscc(x, y, phi, best);

  Path path;
  if (best.word < 0) return path;
  const auto& word = detail::kWords[static_cast<std::size_t>(best.word)];
  const std::size_t n = detail::kWordSize[static_cast<std::size_t>(best.word)];
  for (std::size_t i = 0; i < n; ++i) {
    if (best.len[i] == 0.0) continue;
    path.segments[path.count++] = Segment{word[i], best.len[i]};
  }
  return path;
}

/// Shortest path between two SE(2) states for the given turning radius.
/// Segment lengths are returned in world units.
inline Path shortest_path(const State& from, const State& to, double radius) {
  if (from == to) return {};
  const double dx = to[0] - from[0];
  const double dy = to[1] - from[1];
  const double c = std::cos(from[2]);
  const double s = std::sin(from[2]);
  const double x = (c * dx + s * dy) / radius;
  const double y = (-s * dx + c * dy) / radius;
  Path path = shortest_normalized(x, y, wrap_angle(to[2] - from[2]));
  for (std::size_t i = 0; i < path.count; ++i) path.segments[i].length *= radius;
  return path;
}

/// Pose reached after travelling `arc` world units along `path` from `from`.
inline State interpolate(const State& from, const Path& path, double radius, double arc) {
  double x = 0.0, y = 0.0, th = from[2];
  double remaining = std::max(arc, 0.0);
  for (std::size_t i = 0; i < path.count && remaining > 0.0; ++i) {
    const Segment& seg = path.segments[i];
    const double step = std::min(remaining, std::abs(seg.length));
    remaining -= step;
    const double v = (seg.length < 0.0 ? -step : step) / radius;
    switch (seg.steer) {
      case Steer::Left:
        x += std::sin(th + v) - std::sin(th);
        y += -std::cos(th + v) + std::cos(th);
        th += v;
        break;
      case Steer::Right:
        x += -std::sin(th - v) + std::sin(th);
        y += std::cos(th - v) - std::cos(th);
        th -= v;
        break;
      case Steer::Straight:
        x += v * std::cos(th);
        y += v * std::sin(th);
        break;
    }
  }
  return State::se2(from[0] + x * radius, from[1] + y * radius, wrap_angle(th));
}

}  // namespace mdmp::rs
