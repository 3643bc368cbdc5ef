#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace conewalk {

using RealVec = std::vector<double>;
using Lattice = std::vector<std::int64_t>;

// Coordinates beyond this magnitude abort the run: desk-scale horizons
// never get close, so tripping the guard means a bug, not a long walk.
inline constexpr std::int64_t kCoordGuard = std::int64_t{1} << 62;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> x) { return dot(x, x); }
inline double norm(std::span<const double> x) { return std::sqrt(norm_sq(x)); }

inline double norm_sq(std::span<const std::int64_t> x) {
  double s = 0.0;
  for (auto c : x) s += static_cast<double>(c) * static_cast<double>(c);
  return s;
}
inline double norm(std::span<const std::int64_t> x) {
  return std::sqrt(norm_sq(x));
}

inline RealVec to_real(std::span<const std::int64_t> x) {
  RealVec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = static_cast<double>(x[i]);
  return r;
}

// x / ||x||; rejects the zero vector.
inline RealVec unit_vector(std::span<const double> x) {
  double n = norm(x);
  if (n == 0.0) throw std::domain_error("unit_vector: zero vector");
  RealVec u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / n;
  return u;
}

// (-x2, x1), the anticlockwise perpendicular in the plane.
inline RealVec perp2(std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("perp2: need dimension 2");
  return {-x[1], x[0]};
}

inline void check_coord_guard(std::span<const std::int64_t> x) {
  for (auto c : x) {
    if (c > kCoordGuard || c < -kCoordGuard)
      throw std::runtime_error("lattice coordinate overflow guard tripped");
  }
}

}  // namespace conewalk
