// conewalk: scenario-driven lattice walk experiments.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conewalk/decomposition.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/scenario.hpp"
#include "conewalk/simulate.hpp"

using namespace conewalk;

namespace {

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::int64_t> horizon;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void apply_overrides(Scenario& s, const GlobalOpts& g) {
  if (g.seed) s.master_seed = *g.seed;
  if (g.runs) s.n_runs = *g.runs;
  if (g.horizon) s.horizon = *g.horizon;
  if (g.workers) s.workers = *g.workers;
  if (g.out) s.out_dir = *g.out;
}

KernelSpec kernel_from_flags(const std::string& variant, int dim, double c,
                             double beta, std::uint64_t env_seed,
                             double chi_bound) {
  std::ostringstream cfg;
  cfg << "name = adhoc\nexperiment = exit_cone\n[kernel]\nvariant = " << variant
      << "\n[run]\nmaster_seed = 0\n";
  KernelSpec spec = parse_scenario_text(cfg.str(), "<flags>").kernel;
  spec.dim = dim;
  spec.c = c;
  spec.beta = beta;
  spec.env_seed = env_seed;
  spec.chi_bound = chi_bound;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice random walks with asymptotically small drift: "
               "simulation, decomposition, and drift-criterion checks"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::uint64_t seed_v = 0;
  int runs_v = 0, workers_v = 0;
  std::int64_t horizon_v = 0;
  std::string out_v;
  auto* seed_opt = app.add_option("--seed", seed_v, "master seed override");
  auto* runs_opt = app.add_option("--runs", runs_v, "run count override");
  auto* horizon_opt = app.add_option("--horizon", horizon_v, "horizon override");
  auto* workers_opt = app.add_option("--workers", workers_v, "worker threads");
  auto* out_opt = app.add_option("--out", out_v, "output directory override");

  // scenario run | scenario check
  auto* scenario_cmd = app.add_subcommand("scenario", "scenario file driver");
  scenario_cmd->require_subcommand(1);
  std::string scenario_path;
  auto* run_cmd = scenario_cmd->add_subcommand("run", "execute a scenario");
  run_cmd->add_option("file", scenario_path, "scenario file")->required();
  auto* check_cmd =
      scenario_cmd->add_subcommand("check", "parse and validate only");
  check_cmd->add_option("file", scenario_path, "scenario file")->required();

  // simulate: ad-hoc exit-from-cone batch
  auto* sim_cmd = app.add_subcommand("simulate", "exit-from-cone batch");
  std::string sim_kernel = "zero_drift";
  int sim_dim = 2;
  double sim_c = 0.0, sim_beta = 1.0, sim_angle = 1.5707963267948966;
  std::vector<std::int64_t> sim_x0;
  sim_cmd->add_option("--kernel", sim_kernel,
                      "zero_drift|radial_drift|principal_a|principal_b|"
                      "half_plane_excursion|rwre");
  sim_cmd->add_option("--dim", sim_dim, "lattice dimension");
  sim_cmd->add_option("--c", sim_c, "drift magnitude");
  sim_cmd->add_option("--beta", sim_beta, "drift decay exponent");
  sim_cmd->add_option("--cone-angle", sim_angle, "cone half-angle (radians)");
  sim_cmd->add_option("--x0", sim_x0, "start coordinates")->expected(-1);

  // verify: assumption report over a state box
  auto* verify_cmd = app.add_subcommand("verify", "check (A1)/(A2) on a box");
  std::string ver_kernel = "zero_drift";
  int ver_dim = 2;
  double ver_c = 0.0, ver_beta = 1.0;
  double ver_kappa = 0.125, ver_B0 = 1.0;
  int ver_k = 1, ver_n0 = 1;
  std::int64_t box_lo = 1, box_hi = 20;
  verify_cmd->add_option("--kernel", ver_kernel, "kernel variant");
  verify_cmd->add_option("--dim", ver_dim, "lattice dimension");
  verify_cmd->add_option("--c", ver_c, "drift magnitude");
  verify_cmd->add_option("--beta", ver_beta, "drift decay exponent");
  verify_cmd->add_option("--kappa", ver_kappa, "isotropy lower bound");
  verify_cmd->add_option("--k", ver_k, "isotropy displacement");
  verify_cmd->add_option("--n0", ver_n0, "skeleton step count");
  verify_cmd->add_option("--B0", ver_B0, "second-moment bound");
  verify_cmd->add_option("--lo", box_lo, "box lower corner (both axes)");
  verify_cmd->add_option("--hi", box_hi, "box upper corner (both axes)");

  // decompose: print one decomposed trajectory as CSV
  auto* dec_cmd = app.add_subcommand("decompose", "trace one skeleton walk");
  std::string dec_kernel = "zero_drift";
  int dec_dim = 2, dec_steps = 100;
  double dec_kappa = 0.125;
  int dec_k = 1, dec_n0 = 1;
  std::vector<std::int64_t> dec_x0;
  dec_cmd->add_option("--kernel", dec_kernel, "kernel variant");
  dec_cmd->add_option("--dim", dec_dim, "lattice dimension");
  dec_cmd->add_option("--steps", dec_steps, "skeleton steps");
  dec_cmd->add_option("--kappa", dec_kappa, "isotropy lower bound");
  dec_cmd->add_option("--k", dec_k, "isotropy displacement");
  dec_cmd->add_option("--n0", dec_n0, "skeleton step count");
  dec_cmd->add_option("--x0", dec_x0, "start coordinates")->expected(-1);

  // geometry: evaluate the Lyapunov contour machinery
  auto* geo_cmd = app.add_subcommand("geometry", "contour diagnostics");
  double geo_nu = 0.2, geo_s = 0.25;
  std::vector<double> geo_x;
  geo_cmd->add_option("--nu", geo_nu, "exponent nu");
  geo_cmd->add_option("--s", geo_s, "contour level s");
  geo_cmd->add_option("--x", geo_x, "evaluation point")->expected(-1);

  // global flags remain usable after a subcommand name
  for (auto* sub : {scenario_cmd, run_cmd, check_cmd, sim_cmd, verify_cmd,
                    dec_cmd, geo_cmd})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (seed_opt->count()) g.seed = seed_v;
  if (runs_opt->count()) g.runs = runs_v;
  if (horizon_opt->count()) g.horizon = horizon_v;
  if (workers_opt->count()) g.workers = workers_v;
  if (out_opt->count()) g.out = out_v;

  try {
    if (run_cmd->parsed()) {
      Scenario s = parse_scenario(scenario_path);
      apply_overrides(s, g);
      int code = run_scenario(s);
      if (code != 0)
        std::cerr << "scenario '" << s.name << "' assertion failed (see "
                  << s.out_dir << ")\n";
      return code;
    }
    if (check_cmd->parsed()) {
      Scenario s = parse_scenario(scenario_path);
      char hash[32];
      std::snprintf(hash, sizeof(hash), "%016llx",
                    static_cast<unsigned long long>(s.scenario_hash));
      std::cout << "ok name=" << s.name << " experiment=" << s.experiment
                << " hash=" << hash << "\n";
      return 0;
    }
    if (sim_cmd->parsed()) {
      Scenario s;
      s.name = "adhoc_simulate";
      s.experiment = "exit_cone";
      s.kernel = kernel_from_flags(sim_kernel, sim_dim, sim_c, sim_beta, 1, 0.125);
      s.cone_angle = sim_angle;
      s.x0 = sim_x0.empty() ? Lattice{50, 0} : Lattice(sim_x0.begin(), sim_x0.end());
      while (static_cast<int>(s.x0.size()) < sim_dim) s.x0.push_back(0);
      s.n_runs = 100;
      s.horizon = 100000;
      s.master_seed = 1;
      apply_overrides(s, g);
      return run_scenario(s);
    }
    if (verify_cmd->parsed()) {
      auto kernel = make_kernel(
          kernel_from_flags(ver_kernel, ver_dim, ver_c, ver_beta, 1, 0.125));
      AssumptionParams params;
      params.kappa = ver_kappa;
      params.k = ver_k;
      params.n0 = ver_n0;
      params.B0 = ver_B0;
      std::vector<Lattice> states;
      for (std::int64_t x1 = box_lo; x1 <= box_hi; ++x1)
        for (std::int64_t x2 = box_lo; x2 <= box_hi; ++x2) {
          Lattice x(ver_dim, 0);
          x[0] = x1;
          if (ver_dim > 1) x[1] = x2;
          if (kernel->in_state_space(x)) states.push_back(std::move(x));
        }
      auto report = verify_assumptions(*kernel, params, states);
      std::cout << "states_checked=" << report.states_checked
                << " all_pass=" << (report.all_pass ? "yes" : "no")
                << " worst_a1_margin=" << report.worst_a1_margin
                << " max_second_moment=" << report.max_second_moment << "\n";
      for (std::size_t i = 0; i < report.failures.size() && i < 10; ++i) {
        const auto& f = report.failures[i];
        std::cout << "  fail " << f.clause << " at (";
        for (std::size_t j = 0; j < f.state.size(); ++j)
          std::cout << (j ? "," : "") << f.state[j];
        std::cout << "): " << f.detail << "\n";
      }
      return report.all_pass ? 0 : 2;
    }
    if (dec_cmd->parsed()) {
      auto kernel = make_kernel(
          kernel_from_flags(dec_kernel, dec_dim, 0.0, 1.0, 1, 0.125));
      AssumptionParams params;
      params.kappa = dec_kappa;
      params.k = dec_k;
      params.n0 = dec_n0;
      Lattice x0 = dec_x0.empty() ? Lattice(dec_dim, 0)
                                  : Lattice(dec_x0.begin(), dec_x0.end());
      RngStream rng(RngStream::derive_key(g.seed.value_or(1), 0, 3));
      auto trace = decompose_trajectory(*kernel, params, x0, dec_steps, rng);
      write_trace_csv(trace, std::cout);
      return 0;
    }
    if (geo_cmd->parsed()) {
      std::cout << "axis_intercept=" << contour_axis_intercept(geo_nu, geo_s)
                << "\n";
      if (!geo_x.empty()) {
        RealVec x(geo_x.begin(), geo_x.end());
        LyapunovParams params(geo_nu, geo_s);
        std::cout << "h=" << h_nu(geo_nu, x)
                  << " h_truncated=" << h_nu_truncated(geo_nu, x)
                  << " in_gamma=" << (in_gamma(params, x) ? "yes" : "no")
                  << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
