#pragma once

#include <span>
#include <utility>
#include <vector>

#include "conewalk/rng.hpp"

namespace conewalk {

struct ProportionCI {
  int successes = 0;
  int trials = 0;
  double level = 0.95;
  double lower = 0.0;
  double upper = 1.0;
};

struct GofReport {
  double statistic = 0.0;
  int dof = 1;
  double p_value = 1.0;
};

// Wilson score interval for a binomial proportion.
ProportionCI wilson_interval(int successes, int trials, double level);

// Pearson chi-square against the given cell probabilities (must sum to 1;
// every expected count at least 5).
GofReport chi_square_gof(std::span<const long> observed,
                         std::span<const double> expected_probs);

// One-sample Kolmogorov-Smirnov against Uniform[a,b]; asymptotic p-value,
// n >= 50 required.
GofReport ks_uniform(std::span<const double> samples, double a, double b);

// Linear-interpolation quantiles of the sorted-copy of values; the median
// of an even-length sample is the mean of the two central order statistics.
std::vector<double> quantiles(std::span<const double> values,
                              std::span<const double> probs);

std::pair<double, double> bootstrap_median_ci(std::span<const double> values,
                                              double level, int resamples,
                                              RngStream& rng);

// Regularized incomplete gamma functions (relative error ~1e-10 over the
// tested domain); exposed for the chi-square tail.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Standard normal quantile (AS241).
double normal_quantile(double p);

}  // namespace conewalk
