#pragma once

#include <vector>

#include "conewalk/rng.hpp"
#include "conewalk/vec.hpp"

namespace conewalk {

// Open circular cone W_d(u; alpha): {x != 0 : u . x/||x|| > cos(alpha)}.
struct Cone {
  RealVec axis;       // unit vector
  double half_angle;  // radians, in (0, pi)

  Cone(RealVec axis_in, double half_angle_in);
  int dim() const { return static_cast<int>(axis.size()); }
  bool contains(std::span<const double> x) const;
  bool contains(std::span<const std::int64_t> x) const;
};

struct LyapunovParams {
  double nu;  // in (0,1)
  double s;   // > 0
  LyapunovParams(double nu_in, double s_in);
};

// h_nu(x) = (x1^2+x2^2)^(1-nu) / (x1^2-x2^2) on the open quadrant
// Q = {x1 > |x2|}; blows up on the boundary.
double h_nu(double nu, std::span<const double> x);

// min(h_nu, 1) on Q, identically 1 off Q (boundary and origin included).
double h_nu_truncated(double nu, std::span<const double> x);

// x in Q and h_nu(x) < s.
bool in_gamma(const LyapunovParams& p, std::span<const double> x);

// The h_nu = c contour cuts the x1-axis at c^(-1/(2 nu)).
double contour_axis_intercept(double nu, double c);

// Directional derivative sum_j y_j D_j h_nu(x) for x inside Q.
double directional_derivative_h(double nu, std::span<const double> x,
                                std::span<const double> y);

enum class WedgeMapDir { Forward, Inverse };

// Diagonal map (x1 cos a, x2 sin a); forward sends the quadrant onto the
// wedge W_2(e1; alpha), alpha in (0, pi/4).
RealVec wedge_map(double alpha, std::span<const double> x, WedgeMapDir dir);

// (x1,...,xd) -> (x1, x_{j+1}), 1 <= j <= d-1.
RealVec project(int j, std::span<const double> x);
Lattice project(int j, std::span<const std::int64_t> x);

// Half-angle a' such that the rectilinear cone
// {x1 > 0, |x_{j+1}| < x1 tan a' for all j} sits inside W_d(e1; alpha).
double inner_cone_angle(double alpha, int d);

// Unit directions u_1..u_K whose cones W_d(u_i; eps) cover R^d \ {0};
// coverage is verified by rejection sampling before returning.
std::vector<RealVec> cone_cover(int d, double eps);

}  // namespace conewalk
