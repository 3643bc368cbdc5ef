#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conewalk/rng.hpp"
#include "conewalk/vec.hpp"

namespace conewalk {

// One displacement atom of a transition law.
struct Atom {
  Lattice dx;
  double p;
};

// Parameters of the standing assumptions: kappa/k/n0 for weak isotropy,
// B0 for second moments, optional extras for the stronger drift conditions.
struct AssumptionParams {
  double kappa = 0.0;
  int k = 1;
  int n0 = 1;
  double B0 = 1.0;
  std::optional<double> eps_plus;  // (A2+) exponent epsilon
  std::optional<double> beta;      // drift-condition exponent, in (0,1)
  std::optional<double> c;         // radial drift lower bound
  std::optional<double> delta;     // transverse decay surplus
  std::optional<double> A0;        // radius beyond which drift conditions apply
};

// A one-step transition law on Z^d. Implementations are immutable after
// construction; sampling needs an exclusive stream per caller.
class Kernel {
 public:
  virtual ~Kernel() = default;

  int dim() const { return dim_; }
  virtual std::string id() const = 0;
  virtual bool in_state_space(std::span<const std::int64_t> x) const {
    (void)x;
    return true;
  }

  // Exact atom table at x, sorted lexicographically by displacement.
  // Structural atoms with probability zero are kept.
  virtual std::vector<Atom> one_step(std::span<const std::int64_t> x) const = 0;

  // Exact mean drift mu(x) = sum p(y) y. Default sums the atom table;
  // built-ins override with the closed form.
  virtual RealVec mean_drift(std::span<const std::int64_t> x) const;

  // Advance x by one sampled increment.
  virtual void sample_step(std::span<std::int64_t> x, RngStream& rng) const;

  explicit Kernel(int dim);

 protected:
  void require_state(std::span<const std::int64_t> x) const;
  int dim_;
};

enum class KernelVariant {
  ZeroDrift,
  RadialDrift,
  PrincipalA,
  PrincipalB,
  HalfPlaneExcursion,
  Rwre,
};

struct KernelSpec {
  KernelVariant variant = KernelVariant::ZeroDrift;
  int dim = 2;
  double c = 0.0;
  double beta = 1.0;
  std::uint64_t env_seed = 0;
  double chi_bound = 0.125;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec);

// Quenched site variables of the random-environment walk.
struct SiteEnvironment {
  std::vector<double> y;    // simplex weights, sum to 1
  std::vector<double> chi;  // |chi_i| <= chi_bound
};

// Pure function of (env_seed, x): keyed counter-based hashing, identical
// results for any query order or thread count.
SiteEnvironment rwre_site(std::uint64_t env_seed,
                          std::span<const std::int64_t> x, double chi_bound);

// Atom table at x for a given site environment (the clamped law of the
// random-environment example).
std::vector<Atom> rwre_transition(const SiteEnvironment& env,
                                  std::span<const std::int64_t> x);

// Exact n-step displacement distribution from x (dynamic programming over
// reachable states). Throws if the expansion exceeds the path cap.
std::vector<Atom> nstep_distribution(const Kernel& kernel, int n,
                                     std::span<const std::int64_t> x,
                                     std::size_t path_cap = 10'000'000);

struct AssumptionFailure {
  Lattice state;
  std::string clause;  // "A1", "A2", "A2+", "radial", "transverse"
  std::string detail;
};

struct AssumptionReport {
  int states_checked = 0;
  bool all_pass = true;
  double worst_a1_margin = 0.0;        // min over states of min atom - kappa
  double max_second_moment = 0.0;      // max over states of E||increment||^2
  double worst_radial_margin = 0.0;    // min of ||x||^beta mu.xhat - c
  double max_transverse_scaled = 0.0;  // max of ||x||^(beta+delta) ||mu_perp||
  std::vector<AssumptionFailure> failures;
};

AssumptionReport verify_assumptions(const Kernel& kernel,
                                    const AssumptionParams& params,
                                    std::span<const Lattice> states);

// The (A1') -> (A1) normalization. Input: per-direction constants
// (k_i, n_i) ordered (+e_1, -e_1, +e_2, -e_2, ...).
std::pair<std::int64_t, std::int64_t> normalize_a1_prime(
    std::span<const std::pair<std::int64_t, std::int64_t>> directions);

}  // namespace conewalk
