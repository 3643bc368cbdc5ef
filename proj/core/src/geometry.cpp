#include "conewalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conewalk {

namespace {

constexpr double kUnitTol = 1e-12;

double gaussian(RngStream& rng) {
  double u1 = rng.next_double();
  double u2 = rng.next_double();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

RealVec random_unit(int d, RngStream& rng) {
  RealVec v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v[i] = gaussian(rng);
    double n = norm(v);
    if (n > 1e-6) {
      for (int i = 0; i < d; ++i) v[i] /= n;
      return v;
    }
  }
}

bool covers(const std::vector<RealVec>& dirs, double eps, int d,
            int n_samples, std::uint64_t key) {
  RngStream rng(key);
  double c = std::cos(eps);
  for (int i = 0; i < n_samples; ++i) {
    RealVec v = random_unit(d, rng);
    bool inside = false;
    for (const auto& u : dirs) {
      if (dot(u, v) > c) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

}  // namespace

Cone::Cone(RealVec axis_in, double half_angle_in)
    : axis(std::move(axis_in)), half_angle(half_angle_in) {
  if (axis.size() < 2) throw std::invalid_argument("Cone: dimension d >= 2");
  if (std::abs(norm(axis) - 1.0) > kUnitTol)
    throw std::invalid_argument("Cone: axis must be a unit vector");
  if (!(half_angle > 0.0 && half_angle < std::numbers::pi))
    throw std::invalid_argument("Cone: half_angle must lie in (0, pi)");
}

bool Cone::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("Cone::contains: dimension mismatch");
  double n = norm(x);
  if (n == 0.0) return false;  // open cone excludes the apex
  return dot(axis, x) > n * std::cos(half_angle);
}

bool Cone::contains(std::span<const std::int64_t> x) const {
  RealVec r = to_real(x);
  return contains(std::span<const double>(r));
}

LyapunovParams::LyapunovParams(double nu_in, double s_in) : nu(nu_in), s(s_in) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("LyapunovParams: nu must lie in (0,1)");
  if (!(s > 0.0)) throw std::invalid_argument("LyapunovParams: s must be > 0");
}

double h_nu(double nu, std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("h_nu: need dimension 2");
  double x1 = x[0], x2 = x[1];
  double denom = x1 * x1 - x2 * x2;
  if (!(x1 > 0.0) || !(denom > 0.0))
    throw std::domain_error("h_nu: x must lie strictly inside the quadrant");
  double r2 = x1 * x1 + x2 * x2;
  return std::pow(r2, 1.0 - nu) / denom;
}

double h_nu_truncated(double nu, std::span<const double> x) {
  if (x.size() != 2)
    throw std::invalid_argument("h_nu_truncated: need dimension 2");
  double x1 = x[0], x2 = x[1];
  if (!(x1 > 0.0) || !(x1 * x1 - x2 * x2 > 0.0)) return 1.0;
  return std::min(h_nu(nu, x), 1.0);
}

bool in_gamma(const LyapunovParams& p, std::span<const double> x) {
  double x1 = x[0], x2 = x[1];
  if (!(x1 > 0.0) || !(x1 * x1 - x2 * x2 > 0.0)) return false;
  return h_nu(p.nu, x) < p.s;
}

double contour_axis_intercept(double nu, double c) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::domain_error("contour_axis_intercept: nu must lie in (0,1)");
  if (!(c > 0.0))
    throw std::domain_error("contour_axis_intercept: c must be > 0");
  return std::pow(c, -1.0 / (2.0 * nu));
}

double directional_derivative_h(double nu, std::span<const double> x,
                                std::span<const double> y) {
  double h = h_nu(nu, x);  // validates x
  double r = norm(x);
  RealVec xhat = unit_vector(x);
  RealVec xperp = perp2(xhat);
  double radial = dot(y, xhat);
  double transverse = dot(y, xperp);
  double cross = (2.0 / nu) * x[0] * x[1] * std::pow(r, 2.0 * nu - 2.0) * h;
  return -2.0 * nu * h / r * (radial - cross * transverse);
}

RealVec wedge_map(double alpha, std::span<const double> x, WedgeMapDir dir) {
  if (x.size() != 2) throw std::invalid_argument("wedge_map: need dimension 2");
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 4.0))
    throw std::domain_error("wedge_map: alpha must lie in (0, pi/4)");
  double c = std::cos(alpha), s = std::sin(alpha);
  if (dir == WedgeMapDir::Forward) return {x[0] * c, x[1] * s};
  return {x[0] / c, x[1] / s};
}

RealVec project(int j, std::span<const double> x) {
  int d = static_cast<int>(x.size());
  if (j < 1 || j > d - 1) throw std::invalid_argument("project: j out of range");
  return {x[0], x[j]};
}

Lattice project(int j, std::span<const std::int64_t> x) {
  int d = static_cast<int>(x.size());
  if (j < 1 || j > d - 1) throw std::invalid_argument("project: j out of range");
  return {x[0], x[j]};
}

double inner_cone_angle(double alpha, int d) {
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2.0))
    throw std::domain_error("inner_cone_angle: alpha must lie in (0, pi/2)");
  if (d < 2) throw std::invalid_argument("inner_cone_angle: d >= 2");
  // Sharp for the extreme ray (1, t, ..., t) of the rectilinear cone.
  return std::atan(std::tan(alpha) / std::sqrt(static_cast<double>(d - 1)));
}

std::vector<RealVec> cone_cover(int d, double eps) {
  if (!(eps > 0.0 && eps < std::numbers::pi / 2.0))
    throw std::domain_error("cone_cover: eps must lie in (0, pi/2)");
  if (d < 2) throw std::invalid_argument("cone_cover: d >= 2");
  constexpr int kVerifySamples = 100000;
  const std::uint64_t verify_key = RngStream::derive_key(0xc0ffee, d);

  if (d == 2) {
    int k = static_cast<int>(std::ceil(2.0 * std::numbers::pi / eps));
    std::vector<RealVec> dirs;
    dirs.reserve(k);
    for (int i = 0; i < k; ++i) {
      double theta = 2.0 * std::numbers::pi * i / k;
      dirs.push_back({std::cos(theta), std::sin(theta)});
    }
    if (!covers(dirs, eps, d, kVerifySamples, verify_key))
      throw std::runtime_error("cone_cover: verification failed (d=2)");
    return dirs;
  }

  // Candidate sets doubled until rejection sampling certifies coverage:
  // Fibonacci sphere for d=3, seeded random directions above.
  int k = std::max(8, static_cast<int>(std::ceil(16.0 / (eps * eps))));
  for (int attempt = 0; attempt < 24; ++attempt, k *= 2) {
    std::vector<RealVec> dirs;
    dirs.reserve(k);
    if (d == 3) {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < k; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / k;
        double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        double theta = golden * i;
        dirs.push_back({rad * std::cos(theta), rad * std::sin(theta), z});
      }
    } else {
      RngStream rng(RngStream::derive_key(0xd1ce, d, k));
      for (int i = 0; i < k; ++i) dirs.push_back(random_unit(d, rng));
    }
    if (covers(dirs, eps, d, kVerifySamples, verify_key)) return dirs;
  }
  throw std::runtime_error("cone_cover: failed to certify a cover");
}

}  // namespace conewalk
