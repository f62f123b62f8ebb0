#pragma once

// Shared value types, error hierarchy and small numeric helpers.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace mdmp {

inline constexpr std::size_t kMaxStateDim = 6;
inline constexpr std::size_t kMaxSpatialDims = 2;

/// A point in a system state space. Coordinates 0 and 1 are always the planar
/// position; the remaining coordinates are heading (SE(2)) or velocity.
struct State {
  std::array<double, kMaxStateDim> c{};
  std::size_t dim = 0;

  State() = default;
  explicit State(std::size_t d) : dim(d) {}

  static State se2(double x, double y, double theta) {
    State s(3);
    s.c = {x, y, theta, 0.0, 0.0, 0.0};
    return s;
  }
  static State planar(double x, double y, double vx, double vy) {
    State s(4);
    s.c = {x, y, vx, vy, 0.0, 0.0};
    return s;
  }

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
  std::size_t size() const { return dim; }

  friend bool operator==(const State&, const State&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const State& s) {
  os << '(';
  for (std::size_t i = 0; i < s.dim; ++i) os << (i ? ", " : "") << s.c[i];
  return os << ')';
}

// Error hierarchy. Every failure surfaced by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class UnreachableError : public Error {
 public:
  using Error::Error;
};
class QueryError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class MalformedFileError : public Error {
 public:
  using Error::Error;
};
class VersionError : public Error {
 public:
  using Error::Error;
};
class ChecksumError : public Error {
 public:
  using Error::Error;
};

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  if (w >= std::numbers::pi) w -= two_pi;
  return w;
}

/// Seeded engine plus a uniform draw that does not depend on the standard
/// library's distribution implementation, so sequences match across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdmp
