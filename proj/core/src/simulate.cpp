#include "conewalk/simulate.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace conewalk {

namespace {

void finalize_direction(StoppingRecord& rec) {
  if (norm_sq(rec.final_state) > 0.0)
    rec.final_direction = unit_vector(to_real(rec.final_state));
}

void append_coords(std::ostream& os, std::span<const std::int64_t> x) {
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ";" : "") << x[i];
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

StoppingRecord run_until(const Kernel& kernel,
                         std::span<const std::int64_t> x0,
                         const StatePredicate& stop, std::int64_t horizon,
                         RngStream& rng, std::int64_t thin_stride) {
  if (horizon < 1) throw std::invalid_argument("run_until: horizon >= 1");
  StoppingRecord rec;
  Lattice x(x0.begin(), x0.end());
  check_coord_guard(x);
  for (std::int64_t t = 0;; ++t) {
    if (thin_stride > 0 && t % thin_stride == 0) rec.thinned.emplace_back(t, x);
    if (stop(x)) {
      rec.stopped = true;
      rec.time = t;
      rec.final_state = std::move(x);
      finalize_direction(rec);
      return rec;
    }
    if (t == horizon) break;
    kernel.sample_step(x, rng);
    if ((t & 0xffff) == 0) check_coord_guard(x);
  }
  rec.stopped = false;
  rec.time = horizon;
  rec.final_state = std::move(x);
  finalize_direction(rec);
  return rec;
}

StoppingRecord exit_time_cone(const Kernel& kernel,
                              std::span<const std::int64_t> x0,
                              const Cone& cone, std::int64_t horizon,
                              RngStream& rng, std::int64_t thin_stride) {
  if (!cone.contains(x0))
    throw std::invalid_argument("exit_time_cone: x0 must start inside");
  auto stop = [&cone](std::span<const std::int64_t> x) {
    return !cone.contains(x);
  };
  return run_until(kernel, x0, stop, horizon, rng, thin_stride);
}

StoppingRecord hit_set_time(const Kernel& kernel,
                            std::span<const std::int64_t> x0,
                            const StatePredicate& target, std::int64_t horizon,
                            RngStream& rng) {
  return run_until(kernel, x0, target, horizon, rng);
}

StoppingRecord radius_exit_time(const Kernel& kernel,
                                std::span<const std::int64_t> x0, double r,
                                std::int64_t horizon, RngStream& rng) {
  double r2 = r * r;
  auto stop = [r2](std::span<const std::int64_t> x) {
    return norm_sq(x) >= r2;
  };
  return run_until(kernel, x0, stop, horizon, rng);
}

RaceOutcome hit_ball_before_exit(const Kernel& kernel,
                                 std::span<const std::int64_t> x0,
                                 std::span<const double> target_center,
                                 double target_radius, double outer_radius,
                                 std::int64_t horizon, RngStream& rng) {
  RealVec offset = to_real(x0);
  double dist = 0.0;
  for (std::size_t i = 0; i < offset.size(); ++i) {
    double diff = target_center[i] - offset[i];
    dist += diff * diff;
  }
  (void)dist;
  double center_norm = norm(target_center);
  RealVec from_x0(offset.size());
  for (std::size_t i = 0; i < offset.size(); ++i)
    from_x0[i] = target_center[i] - offset[i];
  if (norm(from_x0) + target_radius >= outer_radius)
    throw std::invalid_argument(
        "hit_ball_before_exit: target must fit strictly inside the outer "
        "radius");
  (void)center_norm;

  double tr2 = target_radius * target_radius;
  double or2 = outer_radius * outer_radius;
  Lattice x(x0.begin(), x0.end());
  for (std::int64_t t = 0; t <= horizon; ++t) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double diff = static_cast<double>(x[i]) - target_center[i];
      d2 += diff * diff;
    }
    if (d2 < tr2) return RaceOutcome::Hit;
    if (norm_sq(x) >= or2) return RaceOutcome::Exited;
    if (t == horizon) break;
    kernel.sample_step(x, rng);
  }
  return RaceOutcome::Censored;
}

BatchResult batch(const Kernel& kernel, const RunFn& run, int n_runs,
                  std::uint64_t master_seed, int workers) {
  if (n_runs < 1) throw std::invalid_argument("batch: n_runs >= 1");
  workers = std::max(1, workers);
  BatchResult result;
  result.n_runs = n_runs;
  result.master_seed = master_seed;
  result.kernel_id = kernel.id();
  result.records.resize(n_runs);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n_runs) return;
      RngStream rng(RngStream::derive_key(master_seed, i, /*purpose=*/1));
      result.records[i] = run(i, rng);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int stopped = 0;
  std::vector<double> stop_times;
  for (const auto& rec : result.records) {
    if (rec.stopped) {
      ++stopped;
      stop_times.push_back(static_cast<double>(rec.time));
    }
  }
  result.summary.stop_fraction = static_cast<double>(stopped) / n_runs;
  if (!stop_times.empty()) {
    const double ps[] = {0.25, 0.5, 0.75, 0.9};
    result.summary.stop_time_quantiles = quantiles(stop_times, ps);
  }
  result.summary.censor_ci = wilson_interval(n_runs - stopped, n_runs, 0.95);
  return result;
}

std::vector<std::pair<std::int64_t, std::optional<RealVec>>> direction_series(
    const Kernel& kernel, std::span<const std::int64_t> x0,
    std::span<const std::int64_t> checkpoints, std::int64_t horizon,
    RngStream& rng) {
  for (std::size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (checkpoints[i] > checkpoints[i + 1])
      throw std::invalid_argument("direction_series: checkpoints sorted");
  if (!checkpoints.empty() && checkpoints.back() > horizon)
    throw std::invalid_argument("direction_series: checkpoints <= horizon");

  std::vector<std::pair<std::int64_t, std::optional<RealVec>>> out;
  Lattice x(x0.begin(), x0.end());
  std::size_t next_cp = 0;
  for (std::int64_t t = 0; t <= horizon && next_cp < checkpoints.size(); ++t) {
    if (t == checkpoints[next_cp]) {
      std::optional<RealVec> dir;
      if (norm_sq(x) > 0.0) dir = unit_vector(to_real(x));
      out.emplace_back(t, std::move(dir));
      ++next_cp;
      if (next_cp == checkpoints.size()) break;
    }
    kernel.sample_step(x, rng);
    if ((t & 0xffff) == 0) check_coord_guard(x);
  }
  return out;
}

std::vector<DriftBin> exact_conditional_drift(const Kernel& kernel,
                                              const StateFunctional& g,
                                              std::span<const Lattice> states) {
  if (states.empty())
    throw std::invalid_argument("exact_conditional_drift: no states matched");
  std::vector<DriftBin> bins;
  bins.reserve(states.size());
  for (const Lattice& x : states) {
    double gx = g(x);
    double mean = 0.0;
    Lattice y = x;
    for (const Atom& a : kernel.one_step(x)) {
      if (a.p == 0.0) continue;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + a.dx[i];
      mean += a.p * (g(y) - gx);
    }
    DriftBin bin;
    {
      std::ostringstream os;
      os << "(";
      for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
      os << ")";
      bin.label = os.str();
    }
    bin.n = 1;
    bin.mean = mean;
    bin.std_error = 0.0;
    bins.push_back(std::move(bin));
  }
  return bins;
}

std::vector<DriftBin> mc_conditional_drift(const Kernel& kernel,
                                           const StateFunctional& g,
                                           std::span<const Lattice> states,
                                           int n_samples, RngStream& rng) {
  if (states.empty())
    throw std::invalid_argument("mc_conditional_drift: no states matched");
  std::vector<DriftBin> bins;
  for (const Lattice& x : states) {
    double gx = g(x);
    double sum = 0.0, sum_sq = 0.0;
    Lattice y(x.size());
    for (int s = 0; s < n_samples; ++s) {
      y = x;
      kernel.sample_step(y, rng);
      double d = g(y) - gx;
      sum += d;
      sum_sq += d * d;
    }
    DriftBin bin;
    bin.label = "mc";
    bin.n = n_samples;
    bin.mean = sum / n_samples;
    double var = (sum_sq - sum * sum / n_samples) / std::max(1, n_samples - 1);
    bin.std_error = std::sqrt(std::max(0.0, var) / n_samples);
    bins.push_back(std::move(bin));
  }
  return bins;
}

EscapeCheck escape_probability_check(
    const Kernel& kernel, const StateFunctional& g,
    const StatePredicate& forbidden, double g0,
    std::span<const std::int64_t> x0, std::span<const Lattice> census_states,
    int n_runs, std::int64_t horizon, std::uint64_t master_seed, int workers,
    double slack) {
  EscapeCheck check;

  // Supermartingale precheck: exact drift must be nonpositive off A.
  auto bins = exact_conditional_drift(kernel, g, census_states);
  check.worst_drift = 0.0;
  for (const auto& b : bins) check.worst_drift = std::max(check.worst_drift, b.mean);
  check.precheck_ok = check.worst_drift <= 0.0;
  if (!check.precheck_ok)
    throw std::runtime_error(
        "escape_probability_check: drift precheck failed (positive exact "
        "drift at a census state)");

  check.bound = g(x0) / g0;
  Lattice start(x0.begin(), x0.end());
  auto run = [&](int, RngStream& rng) {
    return run_until(kernel, start, forbidden, horizon, rng);
  };
  BatchResult result = batch(kernel, run, n_runs, master_seed, workers);
  for (const auto& rec : result.records)
    if (rec.stopped) ++check.hits;
  check.runs = n_runs;
  check.hit_ci = wilson_interval(check.hits, n_runs, 0.95);
  check.bound_holds = check.hit_ci.upper <= check.bound + slack;
  return check;
}

ConcentrationReport concentration_checks(
    int d, double kappa, int k, std::span<const std::int64_t> t_values,
    std::span<const double> r_values, double b,
    std::span<const double> z_thresholds, int n_runs,
    std::uint64_t master_seed, int workers) {
  if (!(kappa > 0.0) || 2 * d * kappa > 1.0)
    throw std::invalid_argument("concentration_checks: need 2d*kappa <= 1");
  workers = std::max(1, workers);
  std::int64_t t_max = 0;
  for (auto t : t_values) t_max = std::max(t_max, t);

  // V-walk: V = +-k e_i each w.p. kappa, 0 w.p. 1 - 2d kappa. Track, per
  // run, max_{s<=t} ||Y_s|| at each requested t. Also the residual walk of
  // the lazy symmetric kernel for the ||Z||^2 maximal inequality.
  std::size_t n_t = t_values.size();
  std::vector<std::vector<double>> y_max(n_runs,
                                         std::vector<double>(n_t, 0.0));
  std::vector<std::vector<double>> z_max(n_runs,
                                         std::vector<double>(n_t, 0.0));
  double p_zero = 1.0 - 2.0 * d * kappa;

  std::atomic<int> next{0};
  auto worker = [&] {
    Lattice y(d, 0), z(d, 0);
    for (;;) {
      int run = next.fetch_add(1);
      if (run >= n_runs) return;
      RngStream rng(RngStream::derive_key(master_seed, run, 2));
      std::fill(y.begin(), y.end(), 0);
      std::fill(z.begin(), z.end(), 0);
      double y_peak = 0.0, z_peak = 0.0;
      for (std::int64_t t = 1; t <= t_max; ++t) {
        double u = rng.next_double();
        if (u >= p_zero) {
          int slot = std::min<int>(static_cast<int>((u - p_zero) / kappa),
                                   2 * d - 1);
          y[slot / 2] += (slot % 2 == 0) ? k : -k;
        } else {
          // residual of the lazy symmetric law: uniform over +-e_i
          std::uint64_t slot = rng.next_below(2 * d);
          z[slot / 2] += (slot % 2 == 0) ? 1 : -1;
        }
        y_peak = std::max(y_peak, norm(y));
        z_peak = std::max(z_peak, norm_sq(z));
        for (std::size_t ti = 0; ti < n_t; ++ti) {
          if (t == t_values[ti]) {
            y_max[run][ti] = y_peak;
            z_max[run][ti] = z_peak;
          }
        }
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ConcentrationReport report;
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    double t = static_cast<double>(t_values[ti]);
    for (double r : r_values) {
      ConcentrationRow row;
      row.t = t_values[ti];
      row.r = r;
      int count = 0;
      for (int run = 0; run < n_runs; ++run)
        if (y_max[run][ti] >= r) ++count;
      row.empirical = static_cast<double>(count) / n_runs;
      row.bound = std::min(
          1.0, 4.0 * d * std::exp(-r * r / (2.0 * d * k * k * t)));
      row.three_sigma =
          3.0 * std::sqrt(row.empirical * (1.0 - row.empirical) / n_runs +
                          1e-12);
      row.holds = row.bound >= 1.0 ||
                  row.empirical <= row.bound + row.three_sigma;
      report.all_hold = report.all_hold && row.holds;
      report.y_rows.push_back(row);
    }
    for (double x : z_thresholds) {
      ConcentrationRow row;
      row.t = t_values[ti];
      row.r = x;
      int count = 0;
      for (int run = 0; run < n_runs; ++run)
        if (z_max[run][ti] >= x) ++count;
      row.empirical = static_cast<double>(count) / n_runs;
      row.bound = std::min(1.0, b * t / x);  // Z_0 = 0
      row.three_sigma =
          3.0 * std::sqrt(row.empirical * (1.0 - row.empirical) / n_runs +
                          1e-12);
      row.holds = row.bound >= 1.0 ||
                  row.empirical <= row.bound + row.three_sigma;
      report.all_hold = report.all_hold && row.holds;
      report.z_rows.push_back(row);
    }
  }
  return report;
}

void write_batch_csv(const BatchResult& result, int dim,
                     std::span<const std::int64_t> x0, std::ostream& os) {
  (void)dim;
  os << "run_id,seed,kernel,dim,x0,outcome,stop_time,final_coords,final_norm,"
        "final_direction\n";
  for (int i = 0; i < result.n_runs; ++i) {
    const auto& rec = result.records[i];
    os << i << "," << result.master_seed << "," << result.kernel_id << ","
       << x0.size() << ",";
    append_coords(os, x0);
    os << "," << (rec.stopped ? "stopped" : "censored") << "," << rec.time
       << ",";
    append_coords(os, rec.final_state);
    os << "," << fmt_double(norm(rec.final_state)) << ",";
    if (rec.final_direction) {
      const auto& dir = *rec.final_direction;
      for (std::size_t j = 0; j < dir.size(); ++j)
        os << (j ? ";" : "") << fmt_double(dir[j]);
    }
    os << "\n";
  }
}

void write_trajectory_csv(const BatchResult& result, std::ostream& os) {
  os << "run_id,t,coords\n";
  for (int i = 0; i < result.n_runs; ++i) {
    for (const auto& [t, x] : result.records[i].thinned) {
      os << i << "," << t << ",";
      append_coords(os, x);
      os << "\n";
    }
  }
}

}  // namespace conewalk
