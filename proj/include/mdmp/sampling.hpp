#pragma once

// Dense low-discrepancy state samples over an axis-aligned box.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mdmp/core.hpp"

namespace mdmp {

struct StateBox {
  State lower{};
  State upper{};
  std::vector<std::size_t> spatial_dims{0, 1};

  std::size_t dim() const { return lower.dim; }

  void validate() const {
    if (lower.dim != upper.dim || lower.dim == 0) throw ConfigError("state box: bound dimensions differ");
    for (std::size_t i = 0; i < lower.dim; ++i) {
      if (!(lower[i] < upper[i])) throw ConfigError("state box: lower bound must be below upper bound");
    }
    for (std::size_t i = 0; i < spatial_dims.size(); ++i) {
      if (spatial_dims[i] >= lower.dim) throw ConfigError("state box: spatial dimension out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (spatial_dims[i] == spatial_dims[j]) throw ConfigError("state box: duplicate spatial dimension");
      }
    }
  }

  /// Half-open containment.
  bool contains(const State& s) const {
    for (std::size_t i = 0; i < lower.dim; ++i) {
      if (s[i] < lower[i] || s[i] >= upper[i]) return false;
    }
    return true;
  }
};

enum class SequenceKind { Sobol, Halton, UniformRandom };

inline std::string to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::Sobol:
      return "sobol";
    case SequenceKind::Halton:
      return "halton";
    case SequenceKind::UniformRandom:
      return "uniform_random";
  }
  return "?";
}

inline SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "sobol") return SequenceKind::Sobol;
  if (s == "halton") return SequenceKind::Halton;
  if (s == "uniform_random") return SequenceKind::UniformRandom;
  throw ConfigError("unknown sequence kind: " + s);
}

struct DenseSampleSet {
  std::vector<State> points;
  StateBox box;
  SequenceKind kind = SequenceKind::Sobol;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxSequenceDim = 6;

/// Sobol points in [0,1)^d, built from the Joe-Kuo primitive polynomials and
/// initial direction numbers. Point n is the XOR of the direction numbers
/// selected by the binary digits of n, so dimension 0 is the base-2 radical
/// inverse.
class SobolSequence {
 public:
  static constexpr int kBits = 32;

  explicit SobolSequence(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxSequenceDim) throw ConfigError("sobol: unsupported dimension");
    struct Poly {
      unsigned degree;
      unsigned coeffs;  // interior coefficients a_1..a_{s-1}
      std::array<std::uint32_t, 4> m;
    };
    static constexpr std::array<Poly, kMaxSequenceDim - 1> polys{{
        {1, 0, {1, 0, 0, 0}},
        {2, 1, {1, 3, 0, 0}},
        {3, 1, {1, 3, 1, 0}},
        {3, 2, {1, 1, 1, 0}},
        {4, 1, {1, 1, 3, 3}},
    }};
    for (std::size_t j = 0; j < kBits; ++j) v_[0][j] = std::uint32_t{1} << (kBits - 1 - j);
    for (std::size_t d = 1; d < dim; ++d) {
      const Poly& p = polys[d - 1];
      std::array<std::uint32_t, kBits> m{};
      for (unsigned k = 0; k < p.degree; ++k) m[k] = p.m[k];
      for (unsigned k = p.degree; k < kBits; ++k) {
        std::uint32_t val = m[k - p.degree] ^ (m[k - p.degree] << p.degree);
        for (unsigned i = 1; i < p.degree; ++i) {
          if ((p.coeffs >> (p.degree - 1 - i)) & 1u) val ^= m[k - i] << i;
        }
        m[k] = val;
      }
      for (std::size_t j = 0; j < kBits; ++j) v_[d][j] = m[j] << (kBits - 1 - j);
    }
  }

  /// Coordinates of point `index` in [0,1)^dim.
  std::array<double, kMaxSequenceDim> point(std::uint64_t index) const {
    std::array<double, kMaxSequenceDim> out{};
    for (std::size_t d = 0; d < dim_; ++d) {
      std::uint32_t x = 0;
      std::uint64_t n = index;
      for (std::size_t j = 0; n != 0 && j < kBits; ++j, n >>= 1) {
        if (n & 1u) x ^= v_[d][j];
      }
      out[d] = static_cast<double>(x) * 0x1.0p-32;
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::array<std::array<std::uint32_t, kBits>, kMaxSequenceDim> v_{};
};

inline double radical_inverse(std::uint64_t n, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv, r = 0.0;
  while (n > 0) {
    r += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

namespace detail {

inline double map_into(double u, double lo, double hi) {
  double x = lo + u * (hi - lo);
  if (x >= hi) x = std::nextafter(hi, lo);
  if (x < lo) x = lo;
  return x;
}

}  // namespace detail

/// First n points of the chosen sequence mapped into the box. Deterministic
/// for every kind; `seed` only affects UniformRandom.
inline DenseSampleSet generate_dense(const StateBox& box, std::size_t n, SequenceKind kind, std::uint64_t seed = 0) {
  box.validate();
  if (n == 0) throw DomainError("generate_dense: need at least one sample");
  const std::size_t d = box.dim();
  if (d > kMaxSequenceDim) throw ConfigError("generate_dense: unsupported dimension");
  DenseSampleSet out;
  out.box = box;
  out.kind = kind;
  out.seed = seed;
  out.points.reserve(n);

  static constexpr std::array<std::uint64_t, kMaxSequenceDim> primes{2, 3, 5, 7, 11, 13};
  const SobolSequence sobol(kind == SequenceKind::Sobol ? d : 1);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kMaxSequenceDim> u{};
    switch (kind) {
      case SequenceKind::Sobol:
        u = sobol.point(i);
        break;
      case SequenceKind::Halton:
        for (std::size_t k = 0; k < d; ++k) u[k] = radical_inverse(i, primes[k]);
        break;
      case SequenceKind::UniformRandom:
        for (std::size_t k = 0; k < d; ++k) u[k] = rng.uniform01();
        break;
    }
    State s(d);
    for (std::size_t k = 0; k < d; ++k) s[k] = detail::map_into(u[k], box.lower[k], box.upper[k]);
    out.points.push_back(s);
  }
  return out;
}

/// Monte-Carlo estimate of the Euclidean dispersion: the largest distance from
/// a uniformly drawn probe to its nearest point in the set.
inline double euclidean_dispersion_estimate(const std::vector<State>& points, const StateBox& box,
                                            std::size_t probe_count, std::uint64_t seed = 1) {
  if (points.empty()) throw DomainError("euclidean_dispersion_estimate: empty point set");
  if (probe_count == 0) throw DomainError("euclidean_dispersion_estimate: need at least one probe");
  const std::size_t d = box.dim();
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t p = 0; p < probe_count; ++p) {
    State q(d);
    for (std::size_t k = 0; k < d; ++k) q[k] = rng.uniform(box.lower[k], box.upper[k]);
    double nearest = std::numeric_limits<double>::infinity();
    for (const State& s : points) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += (s[k] - q[k]) * (s[k] - q[k]);
      nearest = std::min(nearest, acc);
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

}  // namespace mdmp
