#include "conewalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conewalk {

namespace {

// Lower incomplete gamma by series expansion.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::domain_error("regularized_gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::domain_error("regularized_gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

// Wichura's AS241 rational approximation.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) *
                    r +
                45921.953931549871457) *
                   r +
               13731.693765509461125) *
                  r +
              1971.5909503065514427) *
                 r +
             133.14166789178437745) *
                r +
            3.387132872796366608) /
           (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                 39307.89580009271061) *
                    r +
                21213.794301586595867) *
                   r +
               5394.1960214247511077) *
                  r +
              687.1870074920579083) *
                 r +
             42.313330701600911252) *
                r +
            1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) *
                   r +
               1.27045825245236838258) *
                  r +
              3.64784832476320460504) *
                 r +
             5.7694972214606914055) *
                r +
            4.6303378461565452959) *
               r +
           1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) *
                   r +
               0.14810397642748007459) *
                  r +
              0.68976733498510000455) *
                 r +
             1.6763848301838038494) *
                r +
            2.05319162663775882187) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) *
                    r +
                0.0012426609473880784386) *
                   r +
               0.026532189526576123093) *
                  r +
              0.29656057182850489123) *
                 r +
             1.7848265399172913358) *
                r +
            5.4637849111641143699) *
               r +
           6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) *
                    r +
                1.8463183175100546818e-5) *
                   r +
               7.868691311456132591e-4) *
                  r +
              0.0148753612908506148525) *
                 r +
             0.13692988092273580531) *
                r +
            0.59983220655588793769) *
               r +
           1.0);
  }
  return q < 0.0 ? -val : val;
}

ProportionCI wilson_interval(int successes, int trials, double level) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: trials >= 1");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: 0 <= successes <= trials");
  double z = normal_quantile(0.5 + level / 2.0);
  double n = trials;
  double phat = successes / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  ProportionCI ci;
  ci.successes = successes;
  ci.trials = trials;
  ci.level = level;
  ci.lower = std::max(0.0, center - half);
  ci.upper = std::min(1.0, center + half);
  return ci;
}

GofReport chi_square_gof(std::span<const long> observed,
                         std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_gof: mismatched categories");
  double psum = 0.0;
  long total = 0;
  for (double p : expected_probs) psum += p;
  for (long o : observed) total += o;
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("chi_square_gof: probabilities must sum to 1");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double expected = expected_probs[i] * total;
    if (expected < 5.0)
      throw std::invalid_argument(
          "chi_square_gof: expected count below 5; draw more samples");
    double diff = observed[i] - expected;
    stat += diff * diff / expected;
  }
  GofReport report;
  report.statistic = stat;
  report.dof = static_cast<int>(observed.size()) - 1;
  report.p_value = regularized_gamma_q(report.dof / 2.0, stat / 2.0);
  return report;
}

GofReport ks_uniform(std::span<const double> samples, double a, double b) {
  if (samples.size() < 50)
    throw std::invalid_argument("ks_uniform: need n >= 50 for the asymptotic");
  if (!(b > a)) throw std::invalid_argument("ks_uniform: need b > a");
  std::vector<double> u(samples.begin(), samples.end());
  std::sort(u.begin(), u.end());
  double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double f = (u[i] - a) / (b - a);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(f - i / n));
  }
  double lambda = std::sqrt(n) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * (j % 2 == 1 ? 1.0 : -1.0) *
                  std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  GofReport report;
  report.statistic = d;
  report.dof = 1;
  report.p_value = std::clamp(p, 0.0, 1.0);
  return report;
}

std::vector<double> quantiles(std::span<const double> values,
                              std::span<const double> probs) {
  if (values.empty()) throw std::invalid_argument("quantiles: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(probs.size());
  double n = static_cast<double>(sorted.size());
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("quantiles: p in [0,1]");
    double idx = p * (n - 1.0);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = idx - lo;
    out.push_back(sorted[lo] * (1.0 - frac) + sorted[hi] * frac);
  }
  return out;
}

std::pair<double, double> bootstrap_median_ci(std::span<const double> values,
                                              double level, int resamples,
                                              RngStream& rng) {
  if (values.empty())
    throw std::invalid_argument("bootstrap_median_ci: empty sample");
  std::vector<double> medians(resamples);
  std::vector<double> draw(values.size());
  const double half[] = {0.5};
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : draw) v = values[rng.next_below(values.size())];
    medians[r] = quantiles(draw, half)[0];
  }
  double alpha = 1.0 - level;
  const double ps[] = {alpha / 2.0, 1.0 - alpha / 2.0};
  auto q = quantiles(medians, ps);
  return {q[0], q[1]};
}

}  // namespace conewalk
