#pragma once

#include <vector>

#include "conewalk/geometry.hpp"
#include "conewalk/kernels.hpp"
#include "conewalk/simulate.hpp"

namespace conewalk {

// Lattice states of Gamma_nu(s) with ||x|| >= radius: rows at geometrically
// spaced x1, each row strided across |x2| up to the contour, boundary-adjacent
// states included.
std::vector<Lattice> gamma_census(double nu, double s, double radius,
                                  int count);

struct LyapunovTuning {
  bool found = false;
  double nu = 0.0;
  double s = 0.0;
  double radius = 0.0;       // census starts beyond this
  double worst_drift = 0.0;  // max exact E[delta h~ | x] over the census
  int census_size = 0;
};

// Grid search over (nu, s): accept the first pair whose exact one-step drift
// of the truncated h is nonpositive at every census state beyond twice the
// contour's axis intercept.
LyapunovTuning tune_lyapunov(const Kernel& kernel,
                             std::span<const double> nu_grid,
                             std::span<const double> s_grid, int census_size);

inline StateFunctional truncated_h_functional(double nu) {
  return [nu](std::span<const std::int64_t> x) {
    RealVec r = to_real(x);
    return h_nu_truncated(nu, r);
  };
}

}  // namespace conewalk
