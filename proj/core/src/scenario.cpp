#include "conewalk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "conewalk/decomposition.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/lyapunov.hpp"
#include "conewalk/simulate.hpp"
#include "conewalk/stats.hpp"

namespace conewalk {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

double to_double(const std::string& origin, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& origin, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    std::int64_t i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected an integer, got '" + v + "'");
  }
}

template <typename T, typename F>
std::vector<T> split_list(const std::string& v, F&& convert) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(convert(trim(item)));
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::set<std::string> kExperiments = {
    "exit_cone",       "direction",     "decompose", "supermartingale",
    "escape_bound",    "concentration", "hit_ball",  "verify_assumptions"};

json manifest_json(const Scenario& s) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(s.scenario_hash));
  return {{"master_seed", s.master_seed},
          {"version", "0.1.0"},
          {"scenario_hash", hash}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

json summary_json(const Scenario& s, const BatchResult& result) {
  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = result.kernel_id;
  j["n_runs"] = result.n_runs;
  j["stop_fraction"] = result.summary.stop_fraction;
  j["stop_time_quantiles"] = result.summary.stop_time_quantiles;
  j["censor_wilson_95"] = {result.summary.censor_ci.lower,
                           result.summary.censor_ci.upper};
  j["manifest"] = manifest_json(s);
  return j;
}

Cone scenario_cone(const Scenario& s) {
  RealVec axis = s.cone_axis;
  if (axis.empty()) {
    axis.assign(s.kernel.dim, 0.0);
    axis[0] = 1.0;
  }
  return Cone(axis, s.cone_angle);
}

double angle_between(const RealVec& a, const RealVec& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

int run_exit_cone(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  Cone cone = scenario_cone(s);
  Lattice x0 = s.x0;
  auto run = [&](int, RngStream& rng) {
    return exit_time_cone(*kernel, x0, cone, s.horizon, rng, s.thin_stride);
  };
  BatchResult result = batch(*kernel, run, s.n_runs, s.master_seed, s.workers);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ostringstream os;
    write_batch_csv(result, s.kernel.dim, x0, os);
    write_text(dir / (s.name + "_records.csv"), os.str());
  }
  if (s.thin_stride > 0) {
    std::ostringstream os;
    write_trajectory_csv(result, os);
    write_text(dir / (s.name + "_traj.csv"), os.str());
  }
  json j = summary_json(s, result);
  int code = 0;
  if (s.assert_stop_fraction_min &&
      result.summary.stop_fraction < *s.assert_stop_fraction_min) {
    j["assert_failure"] = "stop_fraction below minimum (censoring too high)";
    code = 2;
  }
  if (s.assert_censor_fraction_max &&
      1.0 - result.summary.stop_fraction > *s.assert_censor_fraction_max) {
    j["assert_failure"] = "censor fraction above maximum";
    code = 2;
  }
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return code;
}

int run_direction(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  if (s.checkpoints.size() < 2)
    throw std::runtime_error("direction: need at least two checkpoints");
  Lattice x0 = s.x0;
  std::size_t n_cp = s.checkpoints.size();
  struct Row {
    std::vector<std::optional<RealVec>> dirs;
    double final_norm = 0.0;
  };
  std::vector<Row> rows(s.n_runs);
  auto run = [&](int i, RngStream& rng) {
    Row& row = rows[i];
    row.dirs.assign(n_cp, std::nullopt);
    Lattice x = x0;
    std::size_t ci = 0;
    while (ci < n_cp && s.checkpoints[ci] == 0) {
      if (norm(x) > 0.0) row.dirs[ci] = unit_vector(to_real(x));
      ++ci;
    }
    for (std::int64_t t = 1; t <= s.horizon; ++t) {
      kernel->sample_step(x, rng);
      if (ci < n_cp && t == s.checkpoints[ci]) {
        if (norm(x) > 0.0) row.dirs[ci] = unit_vector(to_real(x));
        ++ci;
      }
      if ((t & 0xffff) == 0) check_coord_guard(x);
    }
    row.final_norm = norm(x);
    StoppingRecord rec;
    rec.stopped = false;
    rec.time = s.horizon;
    rec.final_state = std::move(x);
    return rec;
  };
  batch(*kernel, run, s.n_runs, s.master_seed, s.workers);

  std::vector<std::vector<double>> gap_angles(n_cp - 1);
  int trapped = 0, traceable = 0, grew = 0;
  double x0_norm = norm(x0);
  std::size_t ref = n_cp - 2;
  for (const Row& row : rows) {
    bool all_present = row.dirs.size() == n_cp;
    for (std::size_t i = 0; all_present && i < n_cp; ++i)
      if (!row.dirs[i]) all_present = false;
    if (!all_present) continue;
    ++traceable;
    for (std::size_t i = 0; i + 1 < n_cp; ++i)
      gap_angles[i].push_back(
          angle_between(*row.dirs[i], *row.dirs[i + 1]));
    bool stays = true;
    for (std::size_t i = ref + 1; i < n_cp; ++i)
      if (angle_between(*row.dirs[ref], *row.dirs[i]) > s.trap_angle)
        stays = false;
    if (stays) ++trapped;
  }
  for (const Row& row : rows)
    if (row.final_norm >= 10.0 * x0_norm) ++grew;

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["n_runs"] = s.n_runs;
  j["checkpoints"] = s.checkpoints;
  std::vector<double> medians;
  const double half[] = {0.5};
  for (auto& g : gap_angles)
    medians.push_back(g.empty() ? 0.0 : quantiles(g, half)[0]);
  j["median_gap_angles"] = medians;
  j["trapped_fraction"] =
      traceable ? static_cast<double>(trapped) / traceable : 0.0;
  j["trap_angle"] = s.trap_angle;
  j["traceable_runs"] = traceable;
  j["final_norm_ge_10x0_fraction"] = static_cast<double>(grew) / s.n_runs;
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ostringstream os;
    os << "run_id,t,direction\n";
    for (int i = 0; i < s.n_runs; ++i) {
      for (std::size_t c = 0; c < rows[i].dirs.size(); ++c) {
        os << i << "," << s.checkpoints[c] << ",";
        if (rows[i].dirs[c]) {
          const auto& d = *rows[i].dirs[c];
          for (std::size_t k = 0; k < d.size(); ++k) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", d[k]);
            os << (k ? ";" : "") << buf;
          }
        }
        os << "\n";
      }
    }
    write_text(dir / (s.name + "_records.csv"), os.str());
  }
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return 0;
}

int run_decompose(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  int d = s.kernel.dim;
  long mismatches = 0;
  std::vector<long> v_counts(2 * d + 1, 0);  // per atom; last = zero atom
  std::string first_trace_csv;
  for (int traj = 0; traj < s.n_runs; ++traj) {
    RngStream rng(RngStream::derive_key(s.master_seed, traj, 3));
    auto trace = decompose_trajectory(*kernel, s.assumptions, s.x0,
                                      static_cast<int>(s.horizon), rng);
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      const auto& step = trace.steps[t];
      bool v_nonzero = false;
      for (int i = 0; i < d; ++i) {
        if (step.v[i] != 0) {
          v_nonzero = true;
          v_counts[2 * i + (step.v[i] > 0 ? 0 : 1)]++;
        }
        // exact identity xi*_t - xi*_0 = Y_t + Z_t
        if (trace.skeleton_states[t + 1][i] - trace.skeleton_states[0][i] !=
            trace.y_partial[t + 1][i] + trace.z_partial[t + 1][i])
          ++mismatches;
        if (step.skeleton_increment[i] != step.v[i] + step.zeta[i])
          ++mismatches;
      }
      if (v_nonzero) {
        for (int i = 0; i < d; ++i)
          if (step.zeta[i] != 0) ++mismatches;
      } else {
        v_counts[2 * d]++;
      }
    }
    if (traj == 0) {
      std::ostringstream os;
      write_trace_csv(trace, os);
      first_trace_csv = os.str();
    }
  }

  std::vector<double> expected(2 * d + 1, s.assumptions.kappa);
  expected[2 * d] = 1.0 - 2.0 * d * s.assumptions.kappa;
  GofReport gof = chi_square_gof(v_counts, expected);

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["trajectories"] = s.n_runs;
  j["skeleton_steps"] = s.horizon;
  j["identity_mismatches"] = mismatches;
  j["v_law_chi_square"] = {{"statistic", gof.statistic},
                           {"dof", gof.dof},
                           {"p_value", gof.p_value}};
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_trace.csv"), first_trace_csv);
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return mismatches == 0 ? 0 : 2;
}

int run_supermartingale(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  LyapunovTuning tuning;
  int census_size = s.n_runs > 1 ? s.n_runs : 10000;
  if (s.nu && s.s) {
    tuning.nu = *s.nu;
    tuning.s = *s.s;
    tuning.radius = 2.0 * contour_axis_intercept(tuning.nu, tuning.s);
    auto census = gamma_census(tuning.nu, tuning.s, tuning.radius, census_size);
    auto bins = exact_conditional_drift(
        *kernel, truncated_h_functional(tuning.nu), census);
    tuning.worst_drift = -std::numeric_limits<double>::infinity();
    for (const auto& b : bins)
      tuning.worst_drift = std::max(tuning.worst_drift, b.mean);
    tuning.census_size = census_size;
    tuning.found = tuning.worst_drift <= 0.0;
  } else {
    const double nu_grid[] = {0.05, 0.10, 0.15, 0.20, 0.25,
                              0.30, 0.35, 0.40, 0.45};
    const double s_grid[] = {0.5, 0.25, 0.1, 0.05};
    tuning = tune_lyapunov(*kernel, nu_grid, s_grid, census_size);
  }

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["tuned"] = {{"nu", tuning.nu}, {"s", tuning.s},
                {"radius", tuning.radius}};
  j["census_size"] = tuning.census_size;
  j["worst_exact_drift"] = tuning.worst_drift;
  j["nonpositive_everywhere"] = tuning.found;
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return tuning.found ? 0 : 2;
}

int run_escape_bound(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  double nu, sv;
  if (s.nu && s.s) {
    nu = *s.nu;
    sv = *s.s;
  } else {
    const double nu_grid[] = {0.05, 0.10, 0.15, 0.20, 0.25,
                              0.30, 0.35, 0.40, 0.45};
    const double s_grid[] = {0.5, 0.25, 0.1, 0.05};
    auto tuning = tune_lyapunov(*kernel, nu_grid, s_grid, 2000);
    if (!tuning.found)
      throw std::runtime_error("escape_bound: no supermartingale (nu, s)");
    nu = tuning.nu;
    sv = tuning.s;
  }
  double K = s.escape_k;

  Lattice x0 = s.x0;
  if (x0.empty()) {
    // on-axis start strictly inside Gamma_nu(s/K)
    double intercept = contour_axis_intercept(nu, sv / K);
    x0 = {static_cast<std::int64_t>(std::ceil(intercept)) + 1, 0};
    check_coord_guard(x0);
  }

  auto census = gamma_census(nu, sv, 2.0 * contour_axis_intercept(nu, sv), 500);
  auto outside_quadrant = [](std::span<const std::int64_t> x) {
    return x[0] <= (x[1] < 0 ? -x[1] : x[1]);
  };
  // g0 = inf of truncated h off Gamma_nu(s) = min(1, s)
  EscapeCheck check = escape_probability_check(
      *kernel, truncated_h_functional(nu), outside_quadrant,
      std::min(1.0, sv), x0, census, s.n_runs, s.horizon, s.master_seed,
      s.workers, /*slack=*/0.02);

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["nu"] = nu;
  j["s"] = sv;
  j["K"] = K;
  j["x0"] = x0;
  j["precheck_worst_drift"] = check.worst_drift;
  j["exit_quadrant_hits"] = check.hits;
  j["runs"] = check.runs;
  j["exit_wilson_95"] = {check.hit_ci.lower, check.hit_ci.upper};
  j["bound"] = check.bound;
  j["bound_holds"] = check.bound_holds;
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  int code = check.bound_holds ? 0 : 2;
  if (s.assert_upper_ci_max && check.hit_ci.upper > *s.assert_upper_ci_max)
    code = 2;
  return code;
}

int run_concentration(const Scenario& s) {
  auto report = concentration_checks(
      s.kernel.dim, s.assumptions.kappa, s.assumptions.k, s.conc_t, s.conc_r,
      s.drift_bound_b, s.z_thresholds, s.n_runs, s.master_seed, s.workers);

  std::ostringstream csv;
  csv << "process,t,threshold,empirical,bound,three_sigma,holds\n";
  char buf[160];
  for (const auto& row : report.y_rows) {
    std::snprintf(buf, sizeof(buf), "y_max,%lld,%.17g,%.17g,%.17g,%.17g,%d\n",
                  static_cast<long long>(row.t), row.r, row.empirical,
                  row.bound, row.three_sigma, row.holds ? 1 : 0);
    csv << buf;
  }
  for (const auto& row : report.z_rows) {
    std::snprintf(buf, sizeof(buf),
                  "z_sq_max,%lld,%.17g,%.17g,%.17g,%.17g,%d\n",
                  static_cast<long long>(row.t), row.r, row.empirical,
                  row.bound, row.three_sigma, row.holds ? 1 : 0);
    csv << buf;
  }

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["n_runs"] = s.n_runs;
  j["all_hold"] = report.all_hold;
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_records.csv"), csv.str());
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return report.all_hold ? 0 : 2;
}

int run_hit_ball(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  Lattice x0 = s.x0;
  std::vector<int> outcomes(s.n_runs);
  auto run = [&](int i, RngStream& rng) {
    auto outcome =
        hit_ball_before_exit(*kernel, x0, s.ball_center, s.ball_radius,
                             s.outer_radius, s.horizon, rng);
    outcomes[i] = static_cast<int>(outcome);
    StoppingRecord rec;
    rec.stopped = outcome == RaceOutcome::Hit;
    return rec;
  };
  BatchResult result = batch(*kernel, run, s.n_runs, s.master_seed, s.workers);
  (void)result;
  int hits = 0, exits = 0, censored = 0;
  for (int o : outcomes) {
    if (o == static_cast<int>(RaceOutcome::Hit)) ++hits;
    else if (o == static_cast<int>(RaceOutcome::Exited)) ++exits;
    else ++censored;
  }

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["n_runs"] = s.n_runs;
  j["hit_fraction"] = static_cast<double>(hits) / s.n_runs;
  j["exited_fraction"] = static_cast<double>(exits) / s.n_runs;
  j["censored_fraction"] = static_cast<double>(censored) / s.n_runs;
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  int code = 0;
  if (s.assert_stop_fraction_min &&
      static_cast<double>(hits) / s.n_runs < *s.assert_stop_fraction_min)
    code = 2;
  return code;
}

int run_verify(const Scenario& s) {
  auto kernel = make_kernel(s.kernel);
  std::vector<Lattice> states;
  for (std::int64_t x1 = s.verify_x1_lo; x1 <= s.verify_x1_hi; ++x1) {
    for (std::int64_t x2 = s.verify_x2_lo; x2 <= s.verify_x2_hi; ++x2) {
      Lattice x(s.kernel.dim, 0);
      x[0] = x1;
      if (s.kernel.dim > 1) x[1] = x2;
      if (kernel->in_state_space(x)) states.push_back(std::move(x));
    }
  }
  auto report = verify_assumptions(*kernel, s.assumptions, states);

  json j;
  j["name"] = s.name;
  j["experiment"] = s.experiment;
  j["kernel"] = kernel->id();
  j["states_checked"] = report.states_checked;
  j["all_pass"] = report.all_pass;
  j["worst_a1_margin"] = report.worst_a1_margin;
  j["max_second_moment"] = report.max_second_moment;
  if (std::isfinite(report.worst_radial_margin))
    j["worst_radial_margin"] = report.worst_radial_margin;
  j["max_transverse_scaled"] = report.max_transverse_scaled;
  json failures = json::array();
  for (std::size_t i = 0; i < report.failures.size() && i < 20; ++i) {
    const auto& f = report.failures[i];
    failures.push_back(
        {{"state", f.state}, {"clause", f.clause}, {"detail", f.detail}});
  }
  j["failures"] = failures;
  j["failure_count"] = report.failures.size();
  j["manifest"] = manifest_json(s);

  std::filesystem::path dir(s.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / (s.name + "_summary.json"), j.dump(2) + "\n");
  return 0;  // the report itself is the deliverable
}

}  // namespace

Scenario parse_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

Scenario parse_scenario_text(const std::string& text,
                             const std::string& origin) {
  Scenario s;
  s.scenario_hash = fnv1a(text);

  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  bool seed_seen = false, nu_auto = false;

  while (std::getline(is, line)) {
    ++line_no;
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        parse_fail(origin, line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {
          "kernel", "assumptions", "geometry", "run",
          "concentration", "verify", "assert", "output"};
      if (!known.count(section))
        parse_fail(origin, line_no, "unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      parse_fail(origin, line_no, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      parse_fail(origin, line_no, "empty key or value");

    auto num = [&] { return to_double(origin, line_no, value); };
    auto integer = [&] { return to_int(origin, line_no, value); };
    auto int_list = [&] {
      return split_list<std::int64_t>(
          value, [&](const std::string& v) { return to_int(origin, line_no, v); });
    };
    auto real_list = [&] {
      return split_list<double>(value, [&](const std::string& v) {
        return to_double(origin, line_no, v);
      });
    };

    if (section.empty()) {
      if (key == "name") s.name = value;
      else if (key == "experiment") s.experiment = value;
      else parse_fail(origin, line_no, "unknown key '" + key + "'");
    } else if (section == "kernel") {
      if (key == "variant") {
        static const std::map<std::string, KernelVariant> variants = {
            {"zero_drift", KernelVariant::ZeroDrift},
            {"radial_drift", KernelVariant::RadialDrift},
            {"principal_a", KernelVariant::PrincipalA},
            {"principal_b", KernelVariant::PrincipalB},
            {"half_plane_excursion", KernelVariant::HalfPlaneExcursion},
            {"rwre", KernelVariant::Rwre}};
        auto it = variants.find(value);
        if (it == variants.end())
          parse_fail(origin, line_no, "unknown kernel variant '" + value + "'");
        s.kernel.variant = it->second;
      } else if (key == "dim") s.kernel.dim = static_cast<int>(integer());
      else if (key == "c") s.kernel.c = num();
      else if (key == "beta") s.kernel.beta = num();
      else if (key == "env_seed")
        s.kernel.env_seed = static_cast<std::uint64_t>(integer());
      else if (key == "chi_bound") s.kernel.chi_bound = num();
      else parse_fail(origin, line_no, "unknown key 'kernel." + key + "'");
    } else if (section == "assumptions") {
      if (key == "kappa") s.assumptions.kappa = num();
      else if (key == "k") s.assumptions.k = static_cast<int>(integer());
      else if (key == "n0") s.assumptions.n0 = static_cast<int>(integer());
      else if (key == "B0") s.assumptions.B0 = num();
      else if (key == "eps_plus") s.assumptions.eps_plus = num();
      else if (key == "beta") s.assumptions.beta = num();
      else if (key == "c") s.assumptions.c = num();
      else if (key == "delta") s.assumptions.delta = num();
      else if (key == "A0") s.assumptions.A0 = num();
      else parse_fail(origin, line_no, "unknown key 'assumptions." + key + "'");
    } else if (section == "geometry") {
      if (key == "cone_axis") s.cone_axis = real_list();
      else if (key == "cone_angle") s.cone_angle = num();
      else if (key == "nu") {
        if (value == "auto") nu_auto = true;
        else s.nu = num();
      } else if (key == "s") {
        if (value == "auto") nu_auto = true;
        else s.s = num();
      } else if (key == "K") s.escape_k = num();
      else if (key == "ball_center") s.ball_center = real_list();
      else if (key == "ball_radius") s.ball_radius = num();
      else if (key == "outer_radius") s.outer_radius = num();
      else parse_fail(origin, line_no, "unknown key 'geometry." + key + "'");
    } else if (section == "run") {
      if (key == "x0") s.x0 = int_list();
      else if (key == "n_runs") s.n_runs = static_cast<int>(integer());
      else if (key == "horizon") s.horizon = integer();
      else if (key == "checkpoints") s.checkpoints = int_list();
      else if (key == "master_seed") {
        s.master_seed = static_cast<std::uint64_t>(integer());
        seed_seen = true;
      } else if (key == "workers") s.workers = static_cast<int>(integer());
      else if (key == "thin_stride") s.thin_stride = integer();
      else if (key == "trap_angle") s.trap_angle = num();
      else parse_fail(origin, line_no, "unknown key 'run." + key + "'");
    } else if (section == "concentration") {
      if (key == "t_values") s.conc_t = int_list();
      else if (key == "r_values") s.conc_r = real_list();
      else if (key == "z_thresholds") s.z_thresholds = real_list();
      else if (key == "b") s.drift_bound_b = num();
      else parse_fail(origin, line_no,
                      "unknown key 'concentration." + key + "'");
    } else if (section == "verify") {
      if (key == "x1_lo") s.verify_x1_lo = integer();
      else if (key == "x1_hi") s.verify_x1_hi = integer();
      else if (key == "x2_lo") s.verify_x2_lo = integer();
      else if (key == "x2_hi") s.verify_x2_hi = integer();
      else parse_fail(origin, line_no, "unknown key 'verify." + key + "'");
    } else if (section == "assert") {
      if (key == "stop_fraction_min") s.assert_stop_fraction_min = num();
      else if (key == "upper_ci_max") s.assert_upper_ci_max = num();
      else if (key == "censor_fraction_max") s.assert_censor_fraction_max = num();
      else parse_fail(origin, line_no, "unknown key 'assert." + key + "'");
    } else if (section == "output") {
      if (key == "out_dir") s.out_dir = value;
      else parse_fail(origin, line_no, "unknown key 'output." + key + "'");
    }
  }
  (void)nu_auto;

  if (s.name.empty()) throw std::runtime_error(origin + ": missing 'name'");
  if (!kExperiments.count(s.experiment))
    throw std::runtime_error(origin + ": missing or unknown 'experiment'");
  if (!seed_seen)
    throw std::runtime_error(origin +
                             ": 'run.master_seed' is mandatory (no wall-clock "
                             "seeding)");
  if (s.kernel.variant == KernelVariant::HalfPlaneExcursion &&
      s.kernel.dim != 2)
    throw std::runtime_error(origin +
                             ": half_plane_excursion requires dim = 2");
  if (!s.x0.empty() && static_cast<int>(s.x0.size()) != s.kernel.dim)
    throw std::runtime_error(origin + ": x0 dimension mismatch");
  if (const char* env = std::getenv("CONEWALK_OUT_DIR")) s.out_dir = env;
  return s;
}

int run_scenario(const Scenario& s) {
  if (s.experiment == "exit_cone") return run_exit_cone(s);
  if (s.experiment == "direction") return run_direction(s);
  if (s.experiment == "decompose") return run_decompose(s);
  if (s.experiment == "supermartingale") return run_supermartingale(s);
  if (s.experiment == "escape_bound") return run_escape_bound(s);
  if (s.experiment == "concentration") return run_concentration(s);
  if (s.experiment == "hit_ball") return run_hit_ball(s);
  if (s.experiment == "verify_assumptions") return run_verify(s);
  throw std::runtime_error("run_scenario: unknown experiment " + s.experiment);
}

}  // namespace conewalk
