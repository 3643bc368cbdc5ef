#include "conewalk/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conewalk {

std::vector<Lattice> gamma_census(double nu, double s, double radius,
                                  int count) {
  LyapunovParams params(nu, s);
  std::vector<Lattice> states;
  states.reserve(count);
  const int rows = 60;
  int per_row = std::max(4, count / rows);
  double x1 = std::max(2.0, std::ceil(radius));
  while (static_cast<int>(states.size()) < count) {
    std::int64_t xi = static_cast<std::int64_t>(x1);
    // widest |x2| still inside Gamma on this row
    std::int64_t x2_max = 0;
    for (std::int64_t probe = xi - 1; probe >= 0; --probe) {
      RealVec p{static_cast<double>(xi), static_cast<double>(probe)};
      if (in_gamma(params, p)) {
        x2_max = probe;
        break;
      }
    }
    std::int64_t stride = std::max<std::int64_t>(1, (2 * x2_max + 1) / per_row);
    for (std::int64_t x2 = -x2_max; x2 <= x2_max; x2 += stride) {
      RealVec p{static_cast<double>(xi), static_cast<double>(x2)};
      if (!in_gamma(params, p)) continue;
      states.push_back({xi, x2});
      if (static_cast<int>(states.size()) >= count) break;
    }
    // keep the extreme boundary-adjacent states in every row
    if (x2_max > 0 && static_cast<int>(states.size()) < count) {
      states.push_back({xi, x2_max});
      if (static_cast<int>(states.size()) < count)
        states.push_back({xi, -x2_max});
    }
    x1 = std::max(x1 + 1.0, x1 * 1.15);
  }
  states.resize(count);
  return states;
}

LyapunovTuning tune_lyapunov(const Kernel& kernel,
                             std::span<const double> nu_grid,
                             std::span<const double> s_grid, int census_size) {
  LyapunovTuning tuning;
  for (double nu : nu_grid) {
    for (double s : s_grid) {
      double radius = 2.0 * contour_axis_intercept(nu, s);
      auto census = gamma_census(nu, s, radius, census_size);
      auto bins =
          exact_conditional_drift(kernel, truncated_h_functional(nu), census);
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& b : bins) worst = std::max(worst, b.mean);
      if (worst <= 0.0) {
        tuning.found = true;
        tuning.nu = nu;
        tuning.s = s;
        tuning.radius = radius;
        tuning.worst_drift = worst;
        tuning.census_size = census_size;
        return tuning;
      }
    }
  }
  return tuning;
}

}  // namespace conewalk
