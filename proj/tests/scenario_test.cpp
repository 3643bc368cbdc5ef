#include <doctest.h>

#include <filesystem>
#include <string>

#include "conewalk/scenario.hpp"

using namespace conewalk;

namespace {

const char* kMinimal = R"(
name = demo
experiment = exit_cone
[kernel]
variant = zero_drift
dim = 2
[geometry]
cone_angle = 1.2
[run]
x0 = 10; 0
n_runs = 5
horizon = 1000
master_seed = 42
)";

std::string with_line(const std::string& base, const std::string& extra) {
  return base + extra + "\n";
}

}  // namespace

TEST_CASE("minimal scenario parses") {
  Scenario s = parse_scenario_text(kMinimal, "<mem>");
  CHECK(s.name == "demo");
  CHECK(s.experiment == "exit_cone");
  CHECK(s.kernel.dim == 2);
  CHECK(s.cone_angle == doctest::Approx(1.2));
  CHECK(s.x0 == Lattice{10, 0});
  CHECK(s.n_runs == 5);
  CHECK(s.horizon == 1000);
  CHECK(s.master_seed == 42);
  CHECK(s.scenario_hash != 0);
}

TEST_CASE("the hash tracks the file text") {
  auto a = parse_scenario_text(kMinimal, "<mem>");
  auto b = parse_scenario_text(with_line(kMinimal, "workers = 2"), "<mem>");
  CHECK(a.scenario_hash != b.scenario_hash);
  auto c = parse_scenario_text(kMinimal, "<other-origin>");
  CHECK(a.scenario_hash == c.scenario_hash);
}

TEST_CASE("omitting the master seed is an error") {
  const char* text = R"(
name = demo
experiment = exit_cone
[kernel]
variant = zero_drift
[run]
n_runs = 5
)";
  CHECK_THROWS_WITH_AS(parse_scenario_text(text, "<mem>"),
                       doctest::Contains("master_seed"), std::runtime_error);
}

TEST_CASE("unknown keys are rejected with their line") {
  const char* text = R"(name = demo
experiment = exit_cone
[kernel]
variant = zero_drift
turbo = yes
[run]
master_seed = 1
)";
  CHECK_THROWS_WITH_AS(parse_scenario_text(text, "demo.scn"),
                       doctest::Contains("demo.scn:5"), std::runtime_error);
}

TEST_CASE("unknown experiment and malformed lines are rejected") {
  CHECK_THROWS_AS(
      parse_scenario_text("name = x\nexperiment = dance\n[run]\nmaster_seed = 1\n",
                          "<mem>"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_scenario_text("name = x\njust some words\n", "<mem>"),
      doctest::Contains("<mem>:2"), std::runtime_error);
  CHECK_THROWS_AS(
      parse_scenario_text(
          "name = x\nexperiment = exit_cone\n[run]\nmaster_seed = soon\n",
          "<mem>"),
      std::runtime_error);
}

TEST_CASE("the excursion kernel demands two dimensions") {
  const char* text = R"(
name = demo
experiment = exit_cone
[kernel]
variant = half_plane_excursion
dim = 3
[run]
master_seed = 1
)";
  CHECK_THROWS_WITH_AS(parse_scenario_text(text, "<mem>"),
                       doctest::Contains("dim = 2"), std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored") {
  std::string text = std::string("# leading comment\n\n") + kMinimal +
                     "workers = 3  # trailing comment\n";
  Scenario s = parse_scenario_text(text, "<mem>");
  CHECK(s.workers == 3);
}

TEST_CASE("a too-small horizon trips the censoring assertion") {
  std::string text = std::string(kMinimal) +
                     "[assert]\nstop_fraction_min = 0.99\n[output]\nout_dir = " +
                     (std::filesystem::temp_directory_path() / "cw_scn_test")
                         .string() +
                     "\n";
  Scenario s = parse_scenario_text(text, "<mem>");
  s.horizon = 2;  // nearly everything censors
  s.n_runs = 50;
  int code = run_scenario(s);
  CHECK(code == 2);
}

TEST_CASE("a comfortable horizon returns success") {
  std::string text = std::string(kMinimal) + "[output]\nout_dir = " +
                     (std::filesystem::temp_directory_path() / "cw_scn_test")
                         .string() +
                     "\n";
  Scenario s = parse_scenario_text(text, "<mem>");
  s.horizon = 200000;
  CHECK(run_scenario(s) == 0);
  CHECK(std::filesystem::exists(
      std::filesystem::temp_directory_path() / "cw_scn_test" /
      "demo_summary.json"));
}
