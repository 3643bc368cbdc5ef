#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conewalk/geometry.hpp"
#include "conewalk/kernels.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/stats.hpp"
#include "conewalk/vec.hpp"

namespace conewalk {

struct StoppingRecord {
  bool stopped = false;
  std::int64_t time = 0;      // stop time, or the horizon if censored
  Lattice final_state;
  std::optional<RealVec> final_direction;  // absent iff final_state = 0
  std::vector<std::pair<std::int64_t, Lattice>> thinned;  // optional trajectory
};

using StatePredicate = std::function<bool(std::span<const std::int64_t>)>;

// Run until the predicate first holds (t = 0 counts) or the horizon passes.
// thin_stride > 0 retains every stride-th state.
StoppingRecord run_until(const Kernel& kernel,
                         std::span<const std::int64_t> x0,
                         const StatePredicate& stop, std::int64_t horizon,
                         RngStream& rng, std::int64_t thin_stride = 0);

// tau_alpha: first exit from the cone. x0 must start inside.
StoppingRecord exit_time_cone(const Kernel& kernel,
                              std::span<const std::int64_t> x0,
                              const Cone& cone, std::int64_t horizon,
                              RngStream& rng, std::int64_t thin_stride = 0);

// sigma(Lambda): first entry into the target set.
StoppingRecord hit_set_time(const Kernel& kernel,
                            std::span<const std::int64_t> x0,
                            const StatePredicate& target, std::int64_t horizon,
                            RngStream& rng);

// rho(r): first time ||x|| >= r.
StoppingRecord radius_exit_time(const Kernel& kernel,
                                std::span<const std::int64_t> x0, double r,
                                std::int64_t horizon, RngStream& rng);

enum class RaceOutcome { Hit, Exited, Censored };

// Race between hitting the ball B_radius(center) and reaching ||x|| >= outer.
RaceOutcome hit_ball_before_exit(const Kernel& kernel,
                                 std::span<const std::int64_t> x0,
                                 std::span<const double> target_center,
                                 double target_radius, double outer_radius,
                                 std::int64_t horizon, RngStream& rng);

struct BatchSummary {
  double stop_fraction = 0.0;
  std::vector<double> stop_time_quantiles;  // at 0.25/0.5/0.75/0.9
  ProportionCI censor_ci;                   // Wilson 95% for censoring
};

struct BatchResult {
  int n_runs = 0;
  std::uint64_t master_seed = 0;
  std::string kernel_id;
  std::vector<StoppingRecord> records;  // ordered by run index
  BatchSummary summary;
};

using RunFn = std::function<StoppingRecord(int run_index, RngStream& rng)>;

// Run i always uses the substream keyed by (master_seed, i), so the result
// is bit-identical for any worker count.
BatchResult batch(const Kernel& kernel, const RunFn& run, int n_runs,
                  std::uint64_t master_seed, int workers);

// Unit direction at each checkpoint where the state is nonzero.
std::vector<std::pair<std::int64_t, std::optional<RealVec>>> direction_series(
    const Kernel& kernel, std::span<const std::int64_t> x0,
    std::span<const std::int64_t> checkpoints, std::int64_t horizon,
    RngStream& rng);

struct DriftBin {
  std::string label;
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;  // zero under the exact plan
};

using StateFunctional = std::function<double(std::span<const std::int64_t>)>;

// Exact plan: enumerate one-step atoms and average g(x+dx) - g(x) per state
// (zero variance). One bin per supplied state.
std::vector<DriftBin> exact_conditional_drift(const Kernel& kernel,
                                              const StateFunctional& g,
                                              std::span<const Lattice> states);

// Monte Carlo plan: n_samples one-step draws per state.
std::vector<DriftBin> mc_conditional_drift(const Kernel& kernel,
                                           const StateFunctional& g,
                                           std::span<const Lattice> states,
                                           int n_samples, RngStream& rng);

struct EscapeCheck {
  bool precheck_ok = false;      // supermartingale drift census nonpositive
  double worst_drift = 0.0;      // max exact drift over the census
  int hits = 0;
  int runs = 0;
  ProportionCI hit_ci;
  double bound = 1.0;            // g(x0) / g0
  bool bound_holds = false;      // upper CI <= bound + slack
};

// Monte Carlo check of the supermartingale escape bound: P[hit A] <= g(x0)/g0.
// The drift precheck runs the exact plan on census_states; refuses (throws)
// if any state has positive drift.
EscapeCheck escape_probability_check(
    const Kernel& kernel, const StateFunctional& g,
    const StatePredicate& forbidden, double g0,
    std::span<const std::int64_t> x0, std::span<const Lattice> census_states,
    int n_runs, std::int64_t horizon, std::uint64_t master_seed, int workers,
    double slack);

struct ConcentrationRow {
  std::int64_t t = 0;
  double r = 0.0;
  double empirical = 0.0;
  double bound = 1.0;      // 4d exp(-r^2 / (2 d k^2 t)), clipped to 1
  double three_sigma = 0.0;
  bool holds = true;
};

// Empirical P[max_{s<=t} ||Y_s|| >= r] for the symmetric V-walk against the
// Levy/Hoeffding bound, plus the maximal-inequality check for ||Z||^2 of the
// lazy symmetric kernel (drift bound b per step).
struct ConcentrationReport {
  std::vector<ConcentrationRow> y_rows;
  std::vector<ConcentrationRow> z_rows;  // bound field holds (b t + y0)/x
  bool all_hold = true;
};

ConcentrationReport concentration_checks(
    int d, double kappa, int k, std::span<const std::int64_t> t_values,
    std::span<const double> r_values, double b,
    std::span<const double> z_thresholds, int n_runs,
    std::uint64_t master_seed, int workers);

void write_batch_csv(const BatchResult& batch, int dim,
                     std::span<const std::int64_t> x0, std::ostream& os);
void write_trajectory_csv(const BatchResult& batch, std::ostream& os);

}  // namespace conewalk
