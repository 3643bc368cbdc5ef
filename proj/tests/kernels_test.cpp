#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>

#include "conewalk/kernels.hpp"
#include "conewalk/stats.hpp"

using namespace conewalk;

namespace {

std::unique_ptr<Kernel> build(KernelVariant v, int dim, double c = 0.0,
                              double beta = 1.0) {
  KernelSpec spec;
  spec.variant = v;
  spec.dim = dim;
  spec.c = c;
  spec.beta = beta;
  spec.env_seed = 42;
  spec.chi_bound = 0.125;
  return make_kernel(spec);
}

Lattice random_state(const Kernel& kernel, RngStream& rng) {
  for (;;) {
    Lattice x(kernel.dim());
    for (auto& xi : x)
      xi = static_cast<std::int64_t>(rng.next_below(2001)) - 1000;
    if (x[0] <= 0) x[0] = 1 - x[0];  // keep restricted kernels in range
    if (kernel.in_state_space(x)) return x;
  }
}

}  // namespace

TEST_CASE("atom tables are probability vectors everywhere") {
  RngStream rng(RngStream::derive_key(5150, 0, 0));
  std::vector<std::unique_ptr<Kernel>> kernels;
  kernels.push_back(build(KernelVariant::ZeroDrift, 2));
  kernels.push_back(build(KernelVariant::RadialDrift, 2, 1.0, 1.0));
  kernels.push_back(build(KernelVariant::RadialDrift, 3, -1.0, 0.5));
  kernels.push_back(build(KernelVariant::PrincipalA, 2, 1.0, 1.0));
  kernels.push_back(build(KernelVariant::PrincipalB, 2, 1.0, 1.0));
  kernels.push_back(build(KernelVariant::HalfPlaneExcursion, 2));
  kernels.push_back(build(KernelVariant::Rwre, 2));
  for (const auto& kernel : kernels) {
    for (int i = 0; i < 10000 / static_cast<int>(kernels.size()); ++i) {
      Lattice x = random_state(*kernel, rng);
      auto atoms = kernel->one_step(x);
      double total = 0.0;
      for (const auto& a : atoms) {
        CHECK(a.p >= 0.0);
        CHECK(a.p <= 1.0);
        total += a.p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      // lexicographic order, no duplicate displacements
      for (std::size_t j = 1; j < atoms.size(); ++j)
        CHECK(atoms[j - 1].dx < atoms[j].dx);
    }
  }
}

TEST_CASE("half-plane excursion law is exact") {
  auto kernel = build(KernelVariant::HalfPlaneExcursion, 2);
  for (std::int64_t x1 = 1; x1 <= 100; ++x1) {
    Lattice x{x1, 17};
    auto atoms = kernel->one_step(x);
    REQUIRE(atoms.size() == 4);
    std::map<Lattice, double> law;
    for (const auto& a : atoms) law[a.dx] = a.p;
    CHECK(law[Lattice{1, 0}] ==
          static_cast<double>(x1 + 1) / (4.0 * static_cast<double>(x1)));
    CHECK(law[Lattice{-1, 0}] ==
          static_cast<double>(x1 - 1) / (4.0 * static_cast<double>(x1)));
    CHECK(law[Lattice{0, 1}] == 0.25);
    CHECK(law[Lattice{0, -1}] == 0.25);
    RealVec mu = kernel->mean_drift(x);
    CHECK(mu[0] == doctest::Approx(1.0 / (2.0 * static_cast<double>(x1)))
                       .epsilon(1e-14));
    CHECK(mu[1] == 0.0);
  }
  CHECK_FALSE(kernel->in_state_space(Lattice{0, 3}));
  CHECK(kernel->in_state_space(Lattice{1, -3}));
}

TEST_CASE("radial drift closed form matches the lattice realization") {
  auto kernel = build(KernelVariant::RadialDrift, 2, 1.0, 1.0);
  RealVec mu = kernel->mean_drift(Lattice{3, 4});
  CHECK(mu[0] == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(mu[1] == doctest::Approx(0.16).epsilon(1e-14));
  // drift at the origin vanishes
  RealVec mu0 = kernel->mean_drift(Lattice{0, 0});
  CHECK(mu0[0] == 0.0);
  CHECK(mu0[1] == 0.0);
}

TEST_CASE("mean drift agrees with direct atom summation") {
  RngStream rng(RngStream::derive_key(5151, 0, 0));
  for (auto variant : {KernelVariant::RadialDrift, KernelVariant::PrincipalA,
                       KernelVariant::Rwre}) {
    auto kernel = build(variant, 2, 0.7, 0.8);
    for (int i = 0; i < 200; ++i) {
      Lattice x = random_state(*kernel, rng);
      RealVec mu = kernel->mean_drift(x);
      RealVec direct(2, 0.0);
      for (const auto& a : kernel->one_step(x))
        for (int j = 0; j < 2; ++j)
          direct[j] += a.p * static_cast<double>(a.dx[j]);
      CHECK(mu[0] == doctest::Approx(direct[0]).epsilon(1e-12));
      CHECK(mu[1] == doctest::Approx(direct[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("site environments are pure functions of seed and site") {
  Lattice x{12, -7};
  auto a = rwre_site(42, x, 0.125);
  auto b = rwre_site(42, x, 0.125);
  CHECK(a.y == b.y);
  CHECK(a.chi == b.chi);
  auto c = rwre_site(43, x, 0.125);
  CHECK(a.y != c.y);

  double total = 0.0;
  for (double yi : a.y) {
    CHECK(yi > 0.0);
    total += yi;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (double chi : a.chi) CHECK(std::abs(chi) <= 0.125);
}

TEST_CASE("environment marginals look uniform across sites") {
  // first simplex coordinate of Y over many sites: Beta(1, d-1) for d=2
  // components reduces to Uniform[0,1]; KS at the 1e-3 level.
  std::vector<double> first;
  for (std::int64_t i = 0; i < 500; ++i)
    first.push_back(rwre_site(7, Lattice{i, 2 * i + 1}, 0.125).y[0]);
  auto report = ks_uniform(first, 0.0, 1.0);
  CHECK(report.p_value > 1e-3);
}

TEST_CASE("rwre transitions clamp pairwise and stay stochastic") {
  auto kernel = build(KernelVariant::Rwre, 2);
  // near the origin the chi/||x|| perturbation is huge: clamping must fire
  auto atoms = kernel->one_step(Lattice{1, 0});
  double total = 0.0;
  for (const auto& a : atoms) {
    CHECK(a.p > 0.0);
    total += a.p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("n-step distribution by dynamic programming") {
  auto kernel = build(KernelVariant::ZeroDrift, 2);
  auto two = nstep_distribution(*kernel, 2, Lattice{0, 0});
  std::map<Lattice, double> law;
  double total = 0.0;
  for (const auto& a : two) {
    law[a.dx] += a.p;
    total += a.p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law[Lattice{0, 0}] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(law[Lattice{1, 1}] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(law[Lattice{2, 0}] == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK_THROWS_AS(nstep_distribution(*kernel, 3, Lattice{0, 0}, 4),
                  std::runtime_error);
}

TEST_CASE("assumption verification accepts the symmetric walk") {
  auto kernel = build(KernelVariant::ZeroDrift, 2);
  AssumptionParams params;
  params.kappa = 0.125;
  params.k = 1;
  params.n0 = 1;
  params.B0 = 1.0;
  std::vector<Lattice> states;
  for (std::int64_t x1 = -5; x1 <= 5; ++x1)
    for (std::int64_t x2 = -5; x2 <= 5; ++x2) states.push_back({x1, x2});
  auto report = verify_assumptions(*kernel, params, states);
  CHECK(report.all_pass);
  CHECK(report.states_checked == 121);
  CHECK(report.worst_a1_margin == doctest::Approx(0.125));
  CHECK(report.max_second_moment == doctest::Approx(1.0));
}

TEST_CASE("assumption verification reports the excursion boundary failure") {
  // At x1 = 1 the left atom has probability 0 < kappa: a genuine (A1)
  // violation for the one-step skeleton.
  auto kernel = build(KernelVariant::HalfPlaneExcursion, 2);
  AssumptionParams params;
  params.kappa = 0.125;
  params.k = 1;
  params.n0 = 1;
  params.B0 = 1.0;
  std::vector<Lattice> states{{1, 0}, {2, 0}, {10, 3}};
  auto report = verify_assumptions(*kernel, params, states);
  CHECK_FALSE(report.all_pass);
  REQUIRE(!report.failures.empty());
  CHECK(report.failures[0].state == Lattice{1, 0});
  CHECK(report.failures[0].clause == "A1");
}

TEST_CASE("directional isotropy constants normalize to a common pair") {
  using P = std::pair<std::int64_t, std::int64_t>;
  std::vector<P> ones = {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
  auto [k1, n1] = normalize_a1_prime(ones);
  CHECK(k1 == 2);
  CHECK(n1 == 2);

  std::vector<P> mixed = {{1, 1}, {1, 2}, {1, 1}, {1, 2}};
  auto [k2, n2] = normalize_a1_prime(mixed);
  CHECK(k2 == 2);
  CHECK(n2 == 8);

  std::vector<P> uneven = {{2, 1}, {3, 1}, {1, 1}, {1, 1}};
  auto [k3, n3] = normalize_a1_prime(uneven);
  // structural invariant: n0 is a multiple of 2 * prod(n_i)
  std::int64_t prod = 1;
  for (auto& [k, n] : uneven) prod *= n;
  CHECK(n3 % (2 * prod) == 0);
  CHECK(k3 % 2 == 0);
  CHECK(k3 > 0);
  CHECK(n3 > 0);

  CHECK_THROWS_AS(normalize_a1_prime(std::vector<P>{{1, 1}}),
                  std::invalid_argument);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(build(KernelVariant::RadialDrift, 2, 1.0, 0.0),
                  std::invalid_argument);
  KernelSpec bad;
  bad.variant = KernelVariant::Rwre;
  bad.dim = 2;
  bad.chi_bound = 0.5;  // must be <= 1/8
  CHECK_THROWS_AS(make_kernel(bad), std::invalid_argument);
}
