#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conewalk/kernels.hpp"
#include "conewalk/vec.hpp"

namespace conewalk {

// A fully validated experiment description parsed from a `key = value`
// scenario file (grammar documented in the repository README).
struct Scenario {
  std::string name;
  std::string experiment;  // exit_cone | direction | decompose |
                           // supermartingale | escape_bound | concentration |
                           // hit_ball | verify_assumptions
  KernelSpec kernel;
  AssumptionParams assumptions;

  // geometry
  RealVec cone_axis;          // defaults to e_1
  double cone_angle = 0.0;    // radians; required by exit_cone
  std::optional<double> nu, s;  // absent => auto grid search
  double escape_k = 10.0;       // the K of the escape bound
  RealVec ball_center;
  double ball_radius = 0.0;
  double outer_radius = 0.0;

  // run
  Lattice x0;
  int n_runs = 1;
  std::int64_t horizon = 1;
  std::vector<std::int64_t> checkpoints;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::int64_t thin_stride = 0;
  double trap_angle = 0.2;

  // concentration grid
  std::vector<std::int64_t> conc_t;
  std::vector<double> conc_r;
  std::vector<double> z_thresholds;
  double drift_bound_b = 1.0;

  // verify_assumptions state sample
  std::int64_t verify_x1_lo = 1, verify_x1_hi = 1;
  std::int64_t verify_x2_lo = 0, verify_x2_hi = 0;

  // assertions (exit code 2 when violated)
  std::optional<double> assert_stop_fraction_min;
  std::optional<double> assert_upper_ci_max;
  std::optional<double> assert_censor_fraction_max;

  // output
  std::string out_dir = ".";

  std::uint64_t scenario_hash = 0;  // FNV-1a of the source file
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text,
                             const std::string& origin);

// Runs the experiment, writes CSV/JSON outputs into out_dir. Returns 0 on
// success, 2 when a configured assertion fails. Runtime errors propagate as
// exceptions (the CLI maps them to exit code 1).
int run_scenario(const Scenario& scenario);

}  // namespace conewalk
