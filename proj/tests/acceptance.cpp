// Acceptance gate: one pass/fail line per criterion, pinned thresholds.
// Exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "conewalk/decomposition.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/kernels.hpp"
#include "conewalk/lyapunov.hpp"
#include "conewalk/scenario.hpp"
#include "conewalk/simulate.hpp"
#include "conewalk/stats.hpp"

#ifndef SCENARIO_DIR
#define SCENARIO_DIR "scenarios"
#endif

using namespace conewalk;

namespace {

int failures = 0;

void report(int n, const std::string& what, bool pass,
            const std::string& detail) {
  std::printf("%s  %2d. %s (%s)\n", pass ? "PASS" : "FAIL", n, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::unique_ptr<Kernel> make(KernelVariant v, int dim, double c = 0.0,
                             double beta = 1.0, std::uint64_t env_seed = 99,
                             double chi_bound = 0.125) {
  KernelSpec spec;
  spec.variant = v;
  spec.dim = dim;
  spec.c = c;
  spec.beta = beta;
  spec.env_seed = env_seed;
  spec.chi_bound = chi_bound;
  return make_kernel(spec);
}

AssumptionParams lazy_params() {
  AssumptionParams p;
  p.kappa = 0.125;
  p.k = 1;
  p.n0 = 1;
  p.B0 = 1.0;
  return p;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// --------------------------------------------------------------------------

void criterion_1_identity() {
  auto t0 = std::chrono::steady_clock::now();
  auto kernel = make(KernelVariant::ZeroDrift, 2);
  long mismatches = 0;
  for (int traj = 0; traj < 100; ++traj) {
    RngStream rng(RngStream::derive_key(20260101, traj, 3));
    auto trace =
        decompose_trajectory(*kernel, lazy_params(), Lattice{0, 0}, 10000, rng);
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      const auto& step = trace.steps[t];
      bool v_nonzero = step.v[0] != 0 || step.v[1] != 0;
      for (int i = 0; i < 2; ++i) {
        if (trace.skeleton_states[t + 1][i] - trace.skeleton_states[0][i] !=
            trace.y_partial[t + 1][i] + trace.z_partial[t + 1][i])
          ++mismatches;
        if (step.skeleton_increment[i] != step.v[i] + step.zeta[i])
          ++mismatches;
        if (v_nonzero && step.zeta[i] != 0) ++mismatches;
      }
    }
  }
  double dt = seconds_since(t0);
  char detail[96];
  std::snprintf(detail, sizeof(detail), "mismatches=%ld, %.1fs", mismatches,
                dt);
  report(1, "exact skeleton decomposition, 100 x 10^4 steps",
         mismatches == 0 && dt < 10.0, detail);
}

void criterion_2_v_law() {
  auto kernel = make(KernelVariant::ZeroDrift, 2);
  auto atoms = skeleton(*kernel, 1, Lattice{0, 0});
  RngStream rng(RngStream::derive_key(20260102, 0, 3));
  std::map<Lattice, long> counts;
  long zero = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto step = sample_decomposed_step(atoms, 0.125, 1, 2, rng);
    if (step.v[0] == 0 && step.v[1] == 0) ++zero;
    else counts[step.v]++;
  }
  std::vector<long> observed{zero};
  std::vector<double> expected{0.5};
  for (const auto& [v, c] : counts) {
    observed.push_back(c);
    expected.push_back(0.125);
  }
  auto gof = chi_square_gof(observed, expected);
  char detail[96];
  std::snprintf(detail, sizeof(detail), "cells=%zu, p=%.4f", observed.size(),
                gof.p_value);
  report(2, "symmetric-atom law chi-square on 10^5 draws",
         observed.size() == 5 && gof.p_value > 0.01, detail);
}

void criterion_3_geometry() {
  bool ok = std::abs(contour_axis_intercept(0.2, 0.25) - 32.0) < 1e-9 &&
            std::abs(h_nu(0.2, RealVec{32.0, 0.0}) - 0.25) < 1e-9;
  double worst_rel = 0.0;
  RngStream rng(RngStream::derive_key(20260103, 0, 0));
  int checked = 0;
  while (checked < 10000) {
    double x1 = 2.0 + 500.0 * rng.next_double();
    double x2 = (2.0 * rng.next_double() - 1.0) * 0.9 * x1;
    double y1 = 2.0 * rng.next_double() - 1.0;
    double y2 = 2.0 * rng.next_double() - 1.0;
    double nu = 0.05 + 0.4 * rng.next_double();
    double exact = directional_derivative_h(nu, RealVec{x1, x2},
                                            RealVec{y1, y2});
    double eps = 1e-6 * x1;
    double fd = (h_nu(nu, RealVec{x1 + eps * y1, x2 + eps * y2}) -
                 h_nu(nu, RealVec{x1 - eps * y1, x2 - eps * y2})) /
                (2.0 * eps);
    double scale = std::max({std::abs(exact), std::abs(fd), 1e-30});
    worst_rel = std::max(worst_rel, std::abs(exact - fd) / scale);
    ++checked;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "worst FD rel err=%.2e", worst_rel);
  report(3, "contour oracle and directional derivative",
         ok && worst_rel <= 1e-6, detail);
}

void criterion_4_excursion() {
  auto kernel = make(KernelVariant::HalfPlaneExcursion, 2);
  bool exact = true;
  std::vector<Lattice> states;
  for (std::int64_t x1 = 1; x1 <= 100; ++x1) {
    Lattice x{x1, 0};
    states.push_back(x);
    std::map<Lattice, double> law;
    for (const auto& a : kernel->one_step(x)) law[a.dx] = a.p;
    double xf = static_cast<double>(x1);
    if (law[Lattice{1, 0}] != (xf + 1.0) / (4.0 * xf)) exact = false;
    if (law[Lattice{-1, 0}] != (xf - 1.0) / (4.0 * xf)) exact = false;
    if (law[Lattice{0, 1}] != 0.25 || law[Lattice{0, -1}] != 0.25)
      exact = false;
  }
  auto bins = exact_conditional_drift(
      *kernel,
      [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); },
      states);
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    worst = std::max(
        worst, std::abs(bins[i].mean -
                        1.0 / (2.0 * static_cast<double>(states[i][0]))));
  char detail[96];
  std::snprintf(detail, sizeof(detail), "law exact=%d, drift err=%.2e", exact,
                worst);
  report(4, "excursion law and exact height drift", exact && worst <= 1e-12,
         detail);
}

void criterion_5_exit() {
  auto t0 = std::chrono::steady_clock::now();
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  std::ostringstream detail;
  bool pass = true;
  for (double c : {-1.0, 0.0, 1.0}) {
    auto kernel = make(KernelVariant::RadialDrift, 2, c, 1.0);
    auto run = [&](int, RngStream& rng) {
      return exit_time_cone(*kernel, Lattice{50, 0}, cone, 1000000, rng);
    };
    auto result = batch(*kernel, run, 500, 20260105, 8);
    if (result.summary.stop_fraction < 0.99) pass = false;
    detail << "c=" << c << ": " << result.summary.stop_fraction << "  ";
  }
  double dt = seconds_since(t0);
  if (dt >= 300.0) pass = false;
  detail << dt << "s";
  report(5, "half-plane exit fractions >= 0.99 at horizon 10^6", pass,
         detail.str());
}

void criterion_6_direction() {
  bool pass = true;
  std::ostringstream detail;
  const std::vector<std::int64_t> cps{1000, 10000, 100000};
  for (int d : {2, 3}) {
    auto kernel = make(KernelVariant::RadialDrift, d, 1.0, 0.5);
    Lattice x0(d, 0);
    x0[0] = 50;
    struct Row {
      std::vector<RealVec> dirs;
      double final_norm = 0.0;
    };
    std::vector<Row> rows(200);
    auto run = [&](int i, RngStream& rng) {
      Lattice x = x0;
      std::size_t ci = 0;
      for (std::int64_t t = 1; t <= cps.back(); ++t) {
        kernel->sample_step(x, rng);
        if (ci < cps.size() && t == cps[ci]) {
          rows[i].dirs.push_back(unit_vector(to_real(x)));
          ++ci;
        }
      }
      rows[i].final_norm = norm(x);
      StoppingRecord rec;
      rec.final_state = x;
      return rec;
    };
    batch(*kernel, run, 200, 20260108 + d, 4);
    std::vector<double> gap01, gap12;
    int trapped = 0, grew = 0;
    for (const auto& row : rows) {
      auto angle = [](const RealVec& a, const RealVec& b) {
        return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
      };
      gap01.push_back(angle(row.dirs[0], row.dirs[1]));
      gap12.push_back(angle(row.dirs[1], row.dirs[2]));
      if (angle(row.dirs[1], row.dirs[2]) <= 0.2) ++trapped;
      if (row.final_norm >= 500.0) ++grew;
    }
    const double half[] = {0.5};
    double m01 = quantiles(gap01, half)[0];
    double m12 = quantiles(gap12, half)[0];
    double trap_frac = trapped / 200.0;
    double grow_frac = grew / 200.0;
    if (!(m12 < m01) || trap_frac < 0.9 || grow_frac < 0.95) pass = false;
    detail << "d=" << d << ": med " << m01 << "->" << m12 << ", trap "
           << trap_frac << ", grow " << grow_frac << "  ";
  }
  report(6, "direction settles: medians shrink, trap >= 0.9, growth >= 0.95",
         pass, detail.str());
}

void criterion_7_supermartingale() {
  auto kernel = make(KernelVariant::RadialDrift, 2, 1.0, 0.5);
  const double nu_grid[] = {0.05, 0.10, 0.15, 0.20, 0.25,
                            0.30, 0.35, 0.40, 0.45};
  const double s_grid[] = {0.5, 0.25, 0.1, 0.05};
  auto tuning = tune_lyapunov(*kernel, nu_grid, s_grid, 10000);
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "nu=%.2f s=%.2f radius=%.0f worst=%.3e", tuning.nu, tuning.s,
                tuning.radius, tuning.worst_drift);
  report(7, "exact drift census nonpositive on 10^4 contour states",
         tuning.found && tuning.worst_drift <= 0.0, detail);
}

void criterion_8_escape() {
  auto kernel = make(KernelVariant::RadialDrift, 2, 1.0, 0.5);
  double nu = 0.05, s = 0.5, K = 10.0;
  double intercept = contour_axis_intercept(nu, s / K);
  Lattice x0{static_cast<std::int64_t>(std::ceil(intercept)) + 1, 0};
  auto census = gamma_census(nu, s, 2.0 * contour_axis_intercept(nu, s), 500);
  auto outside_quadrant = [](std::span<const std::int64_t> x) {
    return x[0] <= (x[1] < 0 ? -x[1] : x[1]);
  };
  auto check = escape_probability_check(
      *kernel, truncated_h_functional(nu), outside_quadrant, std::min(1.0, s),
      x0, census, 2000, 1000000, 20260111, 4, 0.02);
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "hits=%d/%d upper=%.4f bound=%.3f+0.02", check.hits,
                check.runs, check.hit_ci.upper, check.bound);
  report(8, "quadrant-escape frequency within the supermartingale bound",
         check.bound_holds && check.hit_ci.upper <= 0.12, detail);
}

void criterion_9_concentration() {
  std::vector<std::int64_t> ts{1000, 10000};
  std::vector<double> rs{100, 200, 300, 600, 1000};
  std::vector<double> zs{10000, 40000, 100000};
  auto rep = concentration_checks(2, 0.125, 1, ts, rs, 1.0, zs, 10000,
                                  20260112, 4);
  int rows = static_cast<int>(rep.y_rows.size() + rep.z_rows.size());
  char detail[64];
  std::snprintf(detail, sizeof(detail), "rows=%d all_hold=%d", rows,
                rep.all_hold ? 1 : 0);
  report(9, "maximal inequalities for Y and ||Z||^2", rep.all_hold, detail);
}

void criterion_10_rwre() {
  // quenched environment is a pure function of (seed, site)
  bool env_ok = true;
  std::vector<Lattice> sites;
  for (std::int64_t i = -20; i <= 20; ++i) sites.push_back({i, 3 - i});
  auto forward = sites;
  auto backward = sites;
  std::reverse(backward.begin(), backward.end());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    auto a = rwre_site(99, forward[i], 0.125);
    auto b = rwre_site(99, backward[sites.size() - 1 - i], 0.125);
    if (a.y != b.y || a.chi != b.chi) env_ok = false;
  }

  auto kernel = make(KernelVariant::Rwre, 2);
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  auto run = [&](int, RngStream& rng) {
    return exit_time_cone(*kernel, Lattice{50, 0}, cone, 1000000, rng);
  };
  std::vector<std::string> outputs;
  double stop_fraction = 0.0;
  for (int workers : {1, 4, 8}) {
    auto result = batch(*kernel, run, 200, 20260113, workers);
    stop_fraction = result.summary.stop_fraction;
    std::ostringstream os;
    write_batch_csv(result, 2, Lattice{50, 0}, os);
    outputs.push_back(os.str());
  }
  bool bitexact = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "env pure=%d, bit-exact=%d, stop=%.3f", env_ok ? 1 : 0,
                bitexact ? 1 : 0, stop_fraction);
  report(10, "quenched environment reproducibility and exit >= 0.95",
         env_ok && bitexact && stop_fraction >= 0.95, detail);
}

void criterion_11_normalization() {
  using P = std::pair<std::int64_t, std::int64_t>;
  std::vector<P> ones = {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
  auto [k, n0] = normalize_a1_prime(ones);
  bool base = (k == 2 && n0 == 2);

  bool invariant = true;
  RngStream rng(RngStream::derive_key(20260114, 0, 0));
  for (int rep = 0; rep < 500; ++rep) {
    int d = 2 + static_cast<int>(rng.next_below(3));
    std::vector<P> dirs;
    for (int i = 0; i < 2 * d; ++i)
      dirs.push_back({1 + static_cast<std::int64_t>(rng.next_below(3)),
                      1 + static_cast<std::int64_t>(rng.next_below(3))});
    auto [kk, nn] = normalize_a1_prime(dirs);
    std::int64_t prod = 1;
    for (auto& [ki, ni] : dirs) prod *= ni;
    if (nn % (2 * prod) != 0 || kk <= 0 || nn <= 0) invariant = false;
  }
  char detail[64];
  std::snprintf(detail, sizeof(detail), "(2,2)=%d invariant=%d", base ? 1 : 0,
                invariant ? 1 : 0);
  report(11, "isotropy constant normalization", base && invariant, detail);
}

void criterion_12_determinism() {
  std::filesystem::path scn =
      std::filesystem::path(SCENARIO_DIR) / "12_determinism.scn";
  Scenario s = parse_scenario(scn.string());
  std::vector<std::string> records, trajs;
  auto tmp = std::filesystem::temp_directory_path() / "cw_acceptance";
  for (int workers : {1, 4, 8}) {
    Scenario variant = s;
    variant.workers = workers;
    variant.out_dir = (tmp / ("w" + std::to_string(workers))).string();
    run_scenario(variant);
    records.push_back(
        read_file(variant.out_dir + "/determinism_records.csv"));
    trajs.push_back(read_file(variant.out_dir + "/determinism_traj.csv"));
  }
  bool same = records[0] == records[1] && records[0] == records[2] &&
              trajs[0] == trajs[1] && trajs[0] == trajs[2] &&
              !records[0].empty() && !trajs[0].empty();
  char detail[64];
  std::snprintf(detail, sizeof(detail), "csv bytes=%zu identical=%d",
                records[0].size(), same ? 1 : 0);
  report(12, "byte-identical CSV across worker counts 1/4/8", same, detail);
}

}  // namespace

int main() {
  criterion_1_identity();
  criterion_2_v_law();
  criterion_3_geometry();
  criterion_4_excursion();
  criterion_5_exit();
  criterion_6_direction();
  criterion_7_supermartingale();
  criterion_8_escape();
  criterion_9_concentration();
  criterion_10_rwre();
  criterion_11_normalization();
  criterion_12_determinism();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
