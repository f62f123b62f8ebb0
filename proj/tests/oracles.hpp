#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's steering or selection code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "mdmp/core.hpp"
#include "mdmp/dispersion.hpp"
#include "mdmp/double_integrator.hpp"
#include "mdmp/systems.hpp"

namespace oracle {

using mdmp::State;

// ---------------------------------------------------------------------------
// Reeds-Shepp: every path word solved numerically.

enum class Seg { L, R, S };

struct Piece {
  Seg seg;
  int dir;     // +1 forward, -1 reverse
  int var;     // index into the unknowns, or -1 for a quarter turn
};

struct Word {
  std::vector<Piece> pieces;
};

inline std::vector<Word> rs_words() {
  std::vector<Word> out;
  const Seg L = Seg::L, R = Seg::R, S = Seg::S;
  auto flip = [](Seg s) { return s == Seg::L ? Seg::R : (s == Seg::R ? Seg::L : Seg::S); };
  auto add = [&](std::vector<Seg> segs, std::vector<int> dirs, std::vector<int> vars) {
    for (int mirror = 0; mirror < 2; ++mirror) {
      for (int sign = -1; sign <= 1; sign += 2) {
        Word w;
        for (std::size_t i = 0; i < segs.size(); ++i) {
          w.pieces.push_back({mirror ? flip(segs[i]) : segs[i], sign * dirs[i], vars[i]});
        }
        out.push_back(w);
      }
    }
  };
  // CSC
  add({L, S, L}, {1, 1, 1}, {0, 1, 2});
  add({L, S, R}, {1, 1, 1}, {0, 1, 2});
  // CCC with one or two cusps
  add({L, R, L}, {1, -1, 1}, {0, 1, 2});
  add({L, R, L}, {1, -1, -1}, {0, 1, 2});
  add({L, R, L}, {1, 1, -1}, {0, 1, 2});
  // CCCC, middle arcs equal
  add({L, R, L, R}, {1, 1, -1, -1}, {0, 1, 1, 2});
  add({L, R, L, R}, {1, -1, -1, 1}, {0, 1, 1, 2});
  // C|C(pi/2)SC and its reverse
  add({L, R, S, L}, {1, -1, -1, -1}, {0, -1, 1, 2});
  add({L, R, S, R}, {1, -1, -1, -1}, {0, -1, 1, 2});
  add({L, S, R, L}, {1, 1, 1, -1}, {0, 1, -1, 2});
  add({R, S, R, L}, {1, 1, 1, -1}, {0, 1, -1, 2});
  // C|C(pi/2)SC(pi/2)|C
  add({L, R, S, L, R}, {1, -1, -1, -1, 1}, {0, -1, 1, -1, 2});
  return out;
}

inline std::array<double, 3> rs_end(const Word& w, const std::array<double, 3>& z) {
  double x = 0, y = 0, th = 0;
  for (const Piece& p : w.pieces) {
    const double len = p.var < 0 ? 0.5 * std::numbers::pi : z[static_cast<std::size_t>(p.var)];
    const double a = p.dir * len;
    switch (p.seg) {
      case Seg::S:
        x += a * std::cos(th);
        y += a * std::sin(th);
        break;
      case Seg::L:
        x += std::sin(th + a) - std::sin(th);
        y += std::cos(th) - std::cos(th + a);
        th += a;
        break;
      case Seg::R:
        x += std::sin(th) - std::sin(th - a);
        y += std::cos(th - a) - std::cos(th);
        th -= a;
        break;
    }
  }
  return {x, y, th};
}

inline double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

inline double rs_word_length(const Word& w, const std::array<double, 3>& z) {
  double total = 0;
  for (const Piece& p : w.pieces) total += p.var < 0 ? 0.5 * std::numbers::pi : z[static_cast<std::size_t>(p.var)];
  return total;
}

/// Newton solve of one word from one starting guess; true on convergence to
/// non-negative lengths.
inline bool rs_newton(const Word& w, double gx, double gy, double gth, std::array<double, 3>& z) {
  auto residual = [&](const std::array<double, 3>& q) {
    const auto e = rs_end(w, q);
    return std::array<double, 3>{e[0] - gx, e[1] - gy, wrap(e[2] - gth)};
  };
  for (int it = 0; it < 60; ++it) {
    const auto f = residual(z);
    const double n = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]);
    if (n < 1e-13) break;
    double J[3][3];
    for (int j = 0; j < 3; ++j) {
      auto zp = z, zm = z;
      const double h = 1e-7;
      zp[j] += h;
      zm[j] -= h;
      const auto fp = residual(zp), fm = residual(zm);
      for (int i = 0; i < 3; ++i) J[i][j] = (fp[i] - fm[i]) / (2 * h);
    }
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    if (std::abs(det) < 1e-14) return false;
    // Cramer's rule.
    std::array<double, 3> step{};
    for (int c = 0; c < 3; ++c) {
      double M[3][3];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M[i][j] = j == c ? f[i] : J[i][j];
      }
      step[c] = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                 M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])) /
                det;
    }
    double scale = 1.0;
    const double mag = std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]);
    if (mag > 2.0) scale = 2.0 / mag;
    for (int c = 0; c < 3; ++c) z[c] -= scale * step[c];
    if (std::abs(z[0]) + std::abs(z[1]) + std::abs(z[2]) > 1e3) return false;
  }
  const auto f = residual(z);
  if (std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) > 1e-11) return false;
  for (double v : z) {
    if (v < -1e-10) return false;
  }
  for (double& v : z) v = std::max(v, 0.0);
  return true;
}

/// Shortest Reeds-Shepp length by solving all 48 words from a grid of
/// starting guesses.
inline double rs_length(const State& from, const State& to, double radius) {
  static const std::vector<Word> words = rs_words();
  const double dx = to[0] - from[0], dy = to[1] - from[1];
  const double c = std::cos(from[2]), s = std::sin(from[2]);
  const double gx = (c * dx + s * dy) / radius, gy = (-s * dx + c * dy) / radius;
  const double gth = wrap(to[2] - from[2]);
  if (std::abs(gx) + std::abs(gy) + std::abs(gth) == 0.0) return 0.0;
  const double dist = std::hypot(gx, gy);
  const std::array<double, 4> seeds{0.2, 1.4, 3.0, 4.8};
  const std::array<double, 3> straight{0.1, dist, dist + 2.0};
  double best = std::numeric_limits<double>::infinity();
  for (const Word& w : words) {
    // which unknowns are straight runs
    std::array<bool, 3> is_s{};
    for (const Piece& p : w.pieces) {
      if (p.var >= 0 && p.seg == Seg::S) is_s[static_cast<std::size_t>(p.var)] = true;
    }
    auto pick = [&](int var, std::size_t i) { return is_s[static_cast<std::size_t>(var)] ? straight[i] : seeds[i]; };
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        for (std::size_t e = 0; e < 4; ++e) {
          if ((is_s[0] && a > 2) || (is_s[1] && b > 2) || (is_s[2] && e > 2)) continue;
          std::array<double, 3> z{pick(0, a), pick(1, b), pick(2, e)};
          if (rs_newton(w, gx, gy, gth, z)) best = std::min(best, rs_word_length(w, z));
        }
      }
    }
  }
  return best * radius;
}

// ---------------------------------------------------------------------------
// Double integrator.

/// Minimum effort at a fixed duration from the cubic that meets both
/// boundary conditions, integrated in closed form.
inline double di_effort(const State& a, const State& b, double T) {
  double e = 0;
  for (int ax = 0; ax < 2; ++ax) {
    const double p0 = a[ax], v0 = a[ax + 2], p1 = b[ax], v1 = b[ax + 2];
    // p(t) = p0 + v0 t + c t^2 + k t^3
    // c T^2 + k T^3 = p1 - p0 - v0 T ; 2 c T + 3 k T^2 = v1 - v0
    const double r1 = p1 - p0 - v0 * T, r2 = v1 - v0;
    const double det = T * T * 3 * T * T - T * T * T * 2 * T;  // = T^4
    const double c = (r1 * 3 * T * T - T * T * T * r2) / det;
    const double k = (T * T * r2 - 2 * T * r1) / det;
    // acceleration 2c + 6k t
    e += 4 * c * c * T + 12 * c * k * T * T + 12 * k * k * T * T * T;
  }
  return e;
}

/// Whether the fixed-duration optimum respects both limits.
inline bool di_feasible(const State& a, const State& b, double T, const mdmp::di::Params& p) {
  for (int ax = 0; ax < 2; ++ax) {
    const double p0 = a[ax], v0 = a[ax + 2], p1 = b[ax], v1 = b[ax + 2];
    const double r1 = p1 - p0 - v0 * T, r2 = v1 - v0;
    const double c = (3 * r1 - T * r2) / (T * T);
    const double k = (T * r2 - 2 * r1) / (T * T * T);
    const double acc0 = 2 * c, acc1 = 2 * c + 6 * k * T;
    if (std::max(std::abs(acc0), std::abs(acc1)) > p.u_max + 1e-9) return false;
    // velocity v0 + 2 c t + 3 k t^2
    double vmax = std::max(std::abs(v0), std::abs(v1));
    if (k != 0) {
      const double ts = -c / (3 * k);
      if (ts > 0 && ts < T) vmax = std::max(vmax, std::abs(v0 + 2 * c * ts + 3 * k * ts * ts));
    }
    if (vmax > p.v_max + 1e-9) return false;
  }
  return true;
}

/// Bi-level cost by a dense log grid over the duration, then a local
/// refinement: golden section inside the feasible region, bisection onto the
/// feasibility boundary when the grid optimum touches it.
inline double di_cost(const State& a, const State& b, const mdmp::di::Params& p, std::size_t n = 10000) {
  if (a == b) return 0.0;
  const double lo = 1e-4, hi = 600.0;
  std::vector<double> ts(n), fs(n);
  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    fs[i] = di_feasible(a, b, ts[i], p) ? di_effort(a, b, ts[i]) + p.rho * ts[i] : std::numeric_limits<double>::infinity();
    if (best == n || fs[i] < fs[best]) best = i;
  }
  auto f = [&](double t) { return di_effort(a, b, t) + p.rho * t; };
  double left = ts[best > 0 ? best - 1 : 0];
  const double right = ts[std::min(best + 1, n - 1)];
  if (!di_feasible(a, b, left, p)) {
    double bad = left, good = ts[best];
    for (int i = 0; i < 200 && good - bad > 1e-13 * good; ++i) {
      const double mid = 0.5 * (bad + good);
      (di_feasible(a, b, mid, p) ? good : bad) = mid;
    }
    left = good;
  }
  double x0 = left, x1 = right;
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double c = x1 - g * (x1 - x0), d = x0 + g * (x1 - x0);
  for (int i = 0; i < 300 && x1 - x0 > 1e-13 * x1; ++i) {
    if (f(c) <= f(d)) {
      x1 = d;
    } else {
      x0 = c;
    }
    c = x1 - g * (x1 - x0);
    d = x0 + g * (x1 - x0);
  }
  return std::min({f(0.5 * (x0 + x1)), f(left), fs[best]});
}

/// Minimum effort by direct transcription: N zero-order-hold input steps,
/// least-norm input meeting the terminal state, per axis.
inline double di_effort_discretized(const State& a, const State& b, double T, std::size_t N = 4000) {
  const double h = T / static_cast<double>(N);
  double e = 0;
  for (int ax = 0; ax < 2; ++ax) {
    const double rp = b[ax] - a[ax] - a[ax + 2] * T;
    const double rv = b[ax + 2] - a[ax + 2];
    // columns g_k = (h (T - t_k - h/2), h); effort = r^T (sum g g^T / h)^-1 r
    double m00 = 0, m01 = 0, m11 = 0;
    for (std::size_t k = 0; k < N; ++k) {
      const double tk = static_cast<double>(k) * h;
      const double gp = h * (T - tk - 0.5 * h), gv = h;
      m00 += gp * gp / h;
      m01 += gp * gv / h;
      m11 += gv * gv / h;
    }
    const double det = m00 * m11 - m01 * m01;
    e += (rp * rp * m11 - 2 * rp * rv * m01 + rv * rv * m00) / det;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Greedy min-dispersion loop, transcribed literally: each pass rebuilds the tiled points
// and recomputes every dense sample's minimum from scratch.

struct LiteralRun {
  std::vector<State> vertices;
  std::vector<double> history;
};

inline LiteralRun literal_min_dispersion(double D, const std::vector<State>& dense, const mdmp::System& sys,
                                         const mdmp::TilingSpec& tiling) {
  LiteralRun run;
  run.vertices.push_back(mdmp::zero_state(sys));
  double d = std::numeric_limits<double>::infinity();
  while (d > D) {
    std::vector<State> tile;
    for (const State& v : run.vertices) {
      for (const auto& o : tiling.offsets()) tile.push_back(tiling.shifted(v, o));
    }
    std::vector<double> jmin(dense.size(), std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < dense.size(); ++s) {
      for (const State& t : tile) {
        const double j = std::max(mdmp::steer_cost(sys, dense[s], t), mdmp::steer_cost(sys, t, dense[s]));
        jmin[s] = std::min(jmin[s], j);
      }
    }
    std::size_t arg = 0;
    for (std::size_t s = 1; s < dense.size(); ++s) {
      if (jmin[s] > jmin[arg]) arg = s;
    }
    run.vertices.push_back(dense[arg]);
    d = jmin[arg];
    run.history.push_back(d);
  }
  return run;
}

}  // namespace oracle
