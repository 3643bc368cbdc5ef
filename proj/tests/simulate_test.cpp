#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <sstream>

#include "conewalk/simulate.hpp"

using namespace conewalk;

namespace {

// Deterministic mover: always steps +e2. Lets stopping-rule geometry be
// checked by hand.
class UpKernel final : public Kernel {
 public:
  UpKernel() : Kernel(2) {}
  std::string id() const override { return "up"; }
  std::vector<Atom> one_step(std::span<const std::int64_t>) const override {
    return {{Lattice{0, 1}, 1.0}};
  }
  void sample_step(std::span<std::int64_t> x, RngStream& rng) const override {
    (void)rng.next_double();  // consume, like a real sampler
    x[1] += 1;
  }
};

std::unique_ptr<Kernel> zero_drift() {
  KernelSpec spec;
  spec.variant = KernelVariant::ZeroDrift;
  spec.dim = 2;
  return make_kernel(spec);
}

std::unique_ptr<Kernel> excursion() {
  KernelSpec spec;
  spec.variant = KernelVariant::HalfPlaneExcursion;
  spec.dim = 2;
  return make_kernel(spec);
}

}  // namespace

TEST_CASE("cone exit time of a straight-line walk is the hand value") {
  UpKernel kernel;
  Cone cone({1.0, 0.0}, std::numbers::pi / 4);
  RngStream rng(RngStream::derive_key(1, 0, 0));
  // from (5,0): states (5,t); (5,5) is on the boundary ray, hence outside
  auto rec = exit_time_cone(kernel, Lattice{5, 0}, cone, 100, rng);
  CHECK(rec.stopped);
  CHECK(rec.time == 5);
  CHECK(rec.final_state == Lattice{5, 5});
  REQUIRE(rec.final_direction.has_value());
  CHECK((*rec.final_direction)[0] == doctest::Approx(1.0 / std::sqrt(2.0)));

  // starting outside the cone is rejected
  CHECK_THROWS_AS(
      exit_time_cone(kernel, Lattice{-5, 0}, cone, 100, rng),
      std::invalid_argument);
}

TEST_CASE("a stop predicate true at the start yields time zero") {
  UpKernel kernel;
  RngStream rng(RngStream::derive_key(2, 0, 0));
  auto rec = hit_set_time(
      kernel, Lattice{7, 7},
      [](std::span<const std::int64_t> x) { return x[0] == 7; }, 100, rng);
  CHECK(rec.stopped);
  CHECK(rec.time == 0);
  CHECK(rec.final_state == Lattice{7, 7});
}

TEST_CASE("censoring reports the horizon and keeps the final state") {
  UpKernel kernel;
  Cone cone({0.0, 1.0}, 3.0);  // walk moves deeper inside, never exits
  RngStream rng(RngStream::derive_key(3, 0, 0));
  auto rec = exit_time_cone(kernel, Lattice{0, 5}, cone, 50, rng);
  CHECK_FALSE(rec.stopped);
  CHECK(rec.time == 50);
  CHECK(rec.final_state == Lattice{0, 55});
}

TEST_CASE("radius exit of the deterministic walk") {
  UpKernel kernel;
  RngStream rng(RngStream::derive_key(4, 0, 0));
  auto rec = radius_exit_time(kernel, Lattice{3, 0}, 5.0, 100, rng);
  CHECK(rec.stopped);
  CHECK(rec.time == 4);  // (3,4) reaches norm 5
  CHECK(rec.final_state == Lattice{3, 4});
}

TEST_CASE("thinned trajectories keep every stride-th state") {
  UpKernel kernel;
  Cone cone({0.0, 1.0}, 3.0);
  RngStream rng(RngStream::derive_key(5, 0, 0));
  auto rec = exit_time_cone(kernel, Lattice{0, 5}, cone, 10, rng, 4);
  REQUIRE(rec.thinned.size() == 3);  // t = 0, 4, 8
  CHECK(rec.thinned[0] == std::pair<std::int64_t, Lattice>{0, {0, 5}});
  CHECK(rec.thinned[1] == std::pair<std::int64_t, Lattice>{4, {0, 9}});
  CHECK(rec.thinned[2] == std::pair<std::int64_t, Lattice>{8, {0, 13}});
}

TEST_CASE("batches are bit-identical for any worker count") {
  auto kernel = zero_drift();
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  auto run = [&](int, RngStream& rng) {
    return exit_time_cone(*kernel, Lattice{10, 0}, cone, 5000, rng);
  };
  std::vector<std::string> outputs;
  for (int workers : {1, 4, 8}) {
    auto result = batch(*kernel, run, 64, 2024, workers);
    std::ostringstream os;
    write_batch_csv(result, 2, Lattice{10, 0}, os);
    outputs.push_back(os.str());
  }
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("batch summary aggregates stop fractions and quantiles") {
  auto kernel = zero_drift();
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  auto run = [&](int, RngStream& rng) {
    return exit_time_cone(*kernel, Lattice{3, 0}, cone, 100000, rng);
  };
  auto result = batch(*kernel, run, 200, 7, 2);
  CHECK(result.summary.stop_fraction > 0.9);
  REQUIRE(result.summary.stop_time_quantiles.size() == 4);
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(result.summary.stop_time_quantiles[i - 1] <=
          result.summary.stop_time_quantiles[i]);
  CHECK(result.summary.censor_ci.lower >= 0.0);
  CHECK(result.summary.censor_ci.upper <= 1.0);
}

TEST_CASE("exact conditional drift of the excursion height is 1/(2 x1)") {
  auto kernel = excursion();
  std::vector<Lattice> states{{1, 0}, {2, 5}, {17, -3}, {100, 40}};
  auto bins = exact_conditional_drift(
      *kernel,
      [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); },
      states);
  REQUIRE(bins.size() == states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    double expected = 1.0 / (2.0 * static_cast<double>(states[i][0]));
    CHECK(bins[i].mean == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bins[i].std_error == 0.0);
  }
}

TEST_CASE("monte carlo drift approaches the exact plan") {
  auto kernel = excursion();
  std::vector<Lattice> states{{4, 0}};
  RngStream rng(RngStream::derive_key(6, 0, 0));
  auto bins = mc_conditional_drift(
      *kernel,
      [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); },
      states, 200000, rng);
  REQUIRE(bins.size() == 1);
  CHECK(bins[0].mean == doctest::Approx(0.125).epsilon(0.05));
  CHECK(bins[0].std_error > 0.0);
}

TEST_CASE("censoring fraction is monotone in the horizon") {
  auto kernel = zero_drift();
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  double prev = -1.0;
  for (std::int64_t horizon : {100, 1000, 10000}) {
    auto run = [&](int, RngStream& rng) {
      return exit_time_cone(*kernel, Lattice{10, 0}, cone, horizon, rng);
    };
    auto result = batch(*kernel, run, 300, 99, 2);
    CHECK(result.summary.stop_fraction >= prev);
    prev = result.summary.stop_fraction;
  }
}

TEST_CASE("ball race precondition and outcomes") {
  auto kernel = zero_drift();
  RngStream rng(RngStream::derive_key(8, 0, 0));
  // ball too close to the outer shell
  CHECK_THROWS_AS(hit_ball_before_exit(*kernel, Lattice{0, 0}, RealVec{9.0, 0.0},
                                       3.0, 10.0, 100, rng),
                  std::invalid_argument);
  int hits = 0, exits = 0;
  for (int i = 0; i < 200; ++i) {
    auto outcome = hit_ball_before_exit(*kernel, Lattice{0, 0},
                                        RealVec{5.0, 0.0}, 2.0, 30.0, 100000,
                                        rng);
    if (outcome == RaceOutcome::Hit) ++hits;
    if (outcome == RaceOutcome::Exited) ++exits;
  }
  CHECK(hits > 0);
  CHECK(exits > 0);
}

TEST_CASE("batch CSV columns follow the documented schema") {
  auto kernel = zero_drift();
  Cone cone({1.0, 0.0}, std::numbers::pi / 2);
  auto run = [&](int, RngStream& rng) {
    return exit_time_cone(*kernel, Lattice{2, 0}, cone, 10000, rng);
  };
  auto result = batch(*kernel, run, 3, 5, 1);
  std::ostringstream os;
  write_batch_csv(result, 2, Lattice{2, 0}, os);
  std::string text = os.str();
  CHECK(text.rfind("run_id,seed,kernel,dim,x0,outcome,stop_time,final_coords,"
                   "final_norm,final_direction\n",
                   0) == 0);
}
