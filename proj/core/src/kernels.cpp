#include "conewalk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace conewalk {

namespace {

std::string coords_str(std::span<const std::int64_t> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ",";
    os << x[i];
  }
  os << ")";
  return os.str();
}

bool lex_less(const Lattice& a, const Lattice& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void sort_atoms(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return lex_less(a.dx, b.dx); });
}

}  // namespace

Kernel::Kernel(int dim) : dim_(dim) {
  if (dim < 2) throw std::invalid_argument("Kernel: dimension d >= 2");
}

void Kernel::require_state(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("Kernel: state dimension mismatch");
  if (!in_state_space(x))
    throw std::domain_error("Kernel: state " + coords_str(x) +
                            " outside state space");
}

RealVec Kernel::mean_drift(std::span<const std::int64_t> x) const {
  require_state(x);
  RealVec mu(dim_, 0.0);
  for (const Atom& a : one_step(x))
    for (int i = 0; i < dim_; ++i) mu[i] += a.p * static_cast<double>(a.dx[i]);
  return mu;
}

void Kernel::sample_step(std::span<std::int64_t> x, RngStream& rng) const {
  auto atoms = one_step(x);
  double u = rng.next_double();
  double acc = 0.0;
  const Atom* chosen = &atoms.back();
  for (const Atom& a : atoms) {
    acc += a.p;
    if (u < acc) {
      chosen = &a;
      break;
    }
  }
  for (int i = 0; i < dim_; ++i) x[i] += chosen->dx[i];
}

// ---------------------------------------------------------------------------
// Drift-field kernels: lazy nearest-neighbour law
//   P[+-e_i] = 1/(2d) +- mu_i(x)/2,
// which realizes the field exactly wherever no clamp fires. The half-drift
// is clamped so every atom keeps probability at least 1/(4d).
// ---------------------------------------------------------------------------

class DriftFieldKernel : public Kernel {
 public:
  using Kernel::Kernel;

  // Unclamped drift field; the realized mu(x) is the clamped version.
  virtual RealVec drift_field(std::span<const std::int64_t> x) const = 0;

  RealVec mean_drift(std::span<const std::int64_t> x) const override {
    require_state(x);
    RealVec mu = drift_field(x);
    for (int i = 0; i < dim_; ++i) mu[i] = clamp_drift(mu[i]);
    return mu;
  }

  bool clamp_fires(std::span<const std::int64_t> x) const {
    RealVec mu = drift_field(x);
    double cap = 1.0 / (2.0 * dim_);
    for (double m : mu)
      if (std::abs(m) > cap) return true;
    return false;
  }

  std::vector<Atom> one_step(std::span<const std::int64_t> x) const override {
    RealVec mu = mean_drift(x);
    double base = 1.0 / (2.0 * dim_);
    std::vector<Atom> atoms;
    atoms.reserve(2 * dim_);
    for (int i = 0; i < dim_; ++i) {
      Lattice up(dim_, 0), down(dim_, 0);
      up[i] = 1;
      down[i] = -1;
      atoms.push_back({std::move(up), base + mu[i] / 2.0});
      atoms.push_back({std::move(down), base - mu[i] / 2.0});
    }
    sort_atoms(atoms);
    return atoms;
  }

  void sample_step(std::span<std::int64_t> x, RngStream& rng) const override {
    require_state(x);
    RealVec mu = drift_field(x);
    double base = 1.0 / (2.0 * dim_);
    double u = rng.next_double();
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double half = clamp_drift(mu[i]) / 2.0;
      acc += base + half;
      if (u < acc) {
        x[i] += 1;
        return;
      }
      acc += base - half;
      if (u < acc) {
        x[i] -= 1;
        return;
      }
    }
    x[dim_ - 1] -= 1;  // rounding residue lands on the last atom
  }

 private:
  double clamp_drift(double m) const {
    double cap = 1.0 / (2.0 * dim_);  // keeps every atom >= 1/(4d)
    return std::clamp(m, -cap, cap);
  }
};

class ZeroDriftKernel final : public DriftFieldKernel {
 public:
  using DriftFieldKernel::DriftFieldKernel;
  std::string id() const override { return "zero_drift"; }
  RealVec drift_field(std::span<const std::int64_t> x) const override {
    return RealVec(x.size(), 0.0);
  }
};

class RadialDriftKernel final : public DriftFieldKernel {
 public:
  RadialDriftKernel(int dim, double c, double beta)
      : DriftFieldKernel(dim), c_(c), beta_(beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("RadialDrift: beta > 0");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "radial_drift(c=" << c_ << ",beta=" << beta_ << ")";
    return os.str();
  }
  // mu(x) = c ||x||^(-beta) xhat, and 0 at the origin.
  RealVec drift_field(std::span<const std::int64_t> x) const override {
    RealVec mu(x.size(), 0.0);
    double r2 = norm_sq(x);
    if (r2 == 0.0) return mu;
    double scale;
    if (beta_ == 1.0) {
      scale = c_ / r2;
    } else if (beta_ == 0.5) {
      double r = std::sqrt(r2);
      scale = c_ / (r * std::sqrt(r));
    } else {
      scale = c_ * std::pow(r2, -(beta_ + 1.0) / 2.0);
    }
    for (std::size_t i = 0; i < x.size(); ++i)
      mu[i] = scale * static_cast<double>(x[i]);
    return mu;
  }

 private:
  double c_, beta_;
};

// mu(x) = c ||x||^(-beta) e_1 on the full lattice.
class PrincipalAKernel final : public DriftFieldKernel {
 public:
  PrincipalAKernel(int dim, double c, double beta)
      : DriftFieldKernel(dim), c_(c), beta_(beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("PrincipalA: beta > 0");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "principal_a(c=" << c_ << ",beta=" << beta_ << ")";
    return os.str();
  }
  RealVec drift_field(std::span<const std::int64_t> x) const override {
    RealVec mu(x.size(), 0.0);
    double r = norm(x);
    if (r > 0.0) mu[0] = c_ * std::pow(r, -beta_);
    return mu;
  }

 private:
  double c_, beta_;
};

// mu(x) = c x_1^(-beta) e_1 on the half-space x_1 >= 1.
class PrincipalBKernel final : public DriftFieldKernel {
 public:
  PrincipalBKernel(int dim, double c, double beta)
      : DriftFieldKernel(dim), c_(c), beta_(beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("PrincipalB: beta > 0");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "principal_b(c=" << c_ << ",beta=" << beta_ << ")";
    return os.str();
  }
  bool in_state_space(std::span<const std::int64_t> x) const override {
    return x[0] >= 1;
  }
  RealVec drift_field(std::span<const std::int64_t> x) const override {
    RealVec mu(x.size(), 0.0);
    mu[0] = c_ * std::pow(static_cast<double>(x[0]), -beta_);
    return mu;
  }

 private:
  double c_, beta_;
};

// ---------------------------------------------------------------------------
// Random walk half-plane excursion (d = 2, x_1 >= 1):
//   P[x_1 -> x_1 +- 1] = (x_1 +- 1)/(4 x_1),  P[x_2 -> x_2 +- 1] = 1/4.
// ---------------------------------------------------------------------------

class HalfPlaneExcursionKernel final : public Kernel {
 public:
  explicit HalfPlaneExcursionKernel(int dim) : Kernel(dim) {
    if (dim != 2)
      throw std::invalid_argument("HalfPlaneExcursion: specified for d = 2");
  }
  std::string id() const override { return "half_plane_excursion"; }
  bool in_state_space(std::span<const std::int64_t> x) const override {
    return x[0] >= 1;
  }
  std::vector<Atom> one_step(std::span<const std::int64_t> x) const override {
    require_state(x);
    double x1 = static_cast<double>(x[0]);
    std::vector<Atom> atoms{
        {{-1, 0}, (x1 - 1.0) / (4.0 * x1)},
        {{0, -1}, 0.25},
        {{0, 1}, 0.25},
        {{1, 0}, (x1 + 1.0) / (4.0 * x1)},
    };
    return atoms;  // already lexicographic
  }
  RealVec mean_drift(std::span<const std::int64_t> x) const override {
    require_state(x);
    return {1.0 / (2.0 * static_cast<double>(x[0])), 0.0};
  }
  void sample_step(std::span<std::int64_t> x, RngStream& rng) const override {
    double x1 = static_cast<double>(x[0]);
    double u = rng.next_double();
    double p_down = (x1 - 1.0) / (4.0 * x1);
    if (u < p_down) {
      x[0] -= 1;
    } else if (u < p_down + 0.25) {
      x[1] -= 1;
    } else if (u < p_down + 0.5) {
      x[1] += 1;
    } else {
      x[0] += 1;
    }
  }
};

// ---------------------------------------------------------------------------
// Random walk in random environment (Example-5 law).
// ---------------------------------------------------------------------------

SiteEnvironment rwre_site(std::uint64_t env_seed,
                          std::span<const std::int64_t> x, double chi_bound) {
  std::uint64_t key = RngStream::derive_key(env_seed, 0x52575245ULL);
  for (auto c : x) key = RngStream::derive_key(key, static_cast<std::uint64_t>(c));
  RngStream rng(key);
  int d = static_cast<int>(x.size());
  SiteEnvironment env;
  env.y = sample_simplex(d, rng);
  env.chi.resize(d);
  for (int i = 0; i < d; ++i)
    env.chi[i] = (2.0 * rng.next_double() - 1.0) * chi_bound;
  return env;
}

std::vector<Atom> rwre_transition(const SiteEnvironment& env,
                                  std::span<const std::int64_t> x) {
  int d = static_cast<int>(x.size());
  double r = norm(x);
  double lo = 1.0 / (4.0 * d), hi = 1.0 - 1.0 / (4.0 * d);
  std::vector<Atom> atoms;
  atoms.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    double base = lo + env.y[i] / 4.0;
    double up = base, down = base;
    if (r > 0.0) {
      double tilt = env.chi[i] / r;
      up = base + tilt;
      down = base - tilt;
      if (up < lo || up > hi || down < lo || down > hi) {
        up = base;  // the clamp replaces both probabilities
        down = base;
      }
    }
    Lattice e_up(d, 0), e_down(d, 0);
    e_up[i] = 1;
    e_down[i] = -1;
    atoms.push_back({std::move(e_up), up});
    atoms.push_back({std::move(e_down), down});
  }
  sort_atoms(atoms);
  return atoms;
}

class RwreKernel final : public Kernel {
 public:
  RwreKernel(int dim, std::uint64_t env_seed, double chi_bound)
      : Kernel(dim), env_seed_(env_seed), chi_bound_(chi_bound) {
    if (!(chi_bound > 0.0 && chi_bound <= 0.125))
      throw std::invalid_argument("Rwre: chi_bound must lie in (0, 1/8]");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "rwre(seed=" << env_seed_ << ",chi_bound=" << chi_bound_ << ")";
    return os.str();
  }
  std::vector<Atom> one_step(std::span<const std::int64_t> x) const override {
    require_state(x);
    return rwre_transition(rwre_site(env_seed_, x, chi_bound_), x);
  }
  void sample_step(std::span<std::int64_t> x, RngStream& rng) const override {
    auto atoms = one_step(x);
    double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t a = 0; a + 1 < atoms.size(); ++a) {
      acc += atoms[a].p;
      if (u < acc) {
        for (int i = 0; i < dim_; ++i) x[i] += atoms[a].dx[i];
        return;
      }
    }
    for (int i = 0; i < dim_; ++i) x[i] += atoms.back().dx[i];
  }

 private:
  std::uint64_t env_seed_;
  double chi_bound_;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec) {
  switch (spec.variant) {
    case KernelVariant::ZeroDrift:
      return std::make_unique<ZeroDriftKernel>(spec.dim);
    case KernelVariant::RadialDrift:
      return std::make_unique<RadialDriftKernel>(spec.dim, spec.c, spec.beta);
    case KernelVariant::PrincipalA:
      return std::make_unique<PrincipalAKernel>(spec.dim, spec.c, spec.beta);
    case KernelVariant::PrincipalB:
      return std::make_unique<PrincipalBKernel>(spec.dim, spec.c, spec.beta);
    case KernelVariant::HalfPlaneExcursion:
      return std::make_unique<HalfPlaneExcursionKernel>(spec.dim);
    case KernelVariant::Rwre:
      return std::make_unique<RwreKernel>(spec.dim, spec.env_seed,
                                          spec.chi_bound);
  }
  throw std::invalid_argument("make_kernel: unknown variant");
}

// ---------------------------------------------------------------------------
// n-step enumeration and assumption verification
// ---------------------------------------------------------------------------

std::vector<Atom> nstep_distribution(const Kernel& kernel, int n,
                                     std::span<const std::int64_t> x,
                                     std::size_t path_cap) {
  if (n < 1) throw std::invalid_argument("nstep_distribution: n >= 1");
  std::map<Lattice, double> current;
  current.emplace(Lattice(x.begin(), x.end()), 1.0);
  std::size_t work = 0;
  for (int step = 0; step < n; ++step) {
    std::map<Lattice, double> next;
    for (const auto& [state, prob] : current) {
      auto atoms = kernel.one_step(state);
      work += atoms.size();
      if (work > path_cap)
        throw std::runtime_error(
            "nstep_distribution: path cap exceeded; lower n0");
      for (const auto& a : atoms) {
        if (a.p == 0.0) continue;
        Lattice y = state;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += a.dx[i];
        next[y] += prob * a.p;
      }
    }
    current = std::move(next);
  }
  std::vector<Atom> result;
  result.reserve(current.size());
  for (const auto& [state, prob] : current) {
    Lattice dx = state;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] -= x[i];
    result.push_back({std::move(dx), prob});
  }
  sort_atoms(result);
  return result;
}

AssumptionReport verify_assumptions(const Kernel& kernel,
                                    const AssumptionParams& params,
                                    std::span<const Lattice> states) {
  if (states.empty())
    throw std::invalid_argument("verify_assumptions: states must be nonempty");
  int d = kernel.dim();
  AssumptionReport report;
  report.worst_a1_margin = 1.0;
  report.worst_radial_margin = std::numeric_limits<double>::infinity();

  for (const Lattice& x : states) {
    ++report.states_checked;

    // (A1): exact n0-step probability of +-k e_i, every axis and sign.
    auto nstep = nstep_distribution(kernel, params.n0, x);
    for (int i = 0; i < d; ++i) {
      for (int sign : {+1, -1}) {
        Lattice target(d, 0);
        target[i] = sign * params.k;
        double p = 0.0;
        for (const auto& a : nstep)
          if (a.dx == target) p = a.p;
        report.worst_a1_margin =
            std::min(report.worst_a1_margin, p - params.kappa);
        if (p + 1e-15 < params.kappa) {
          std::ostringstream os;
          os << "P[" << (sign > 0 ? "+" : "-") << params.k << "e_" << (i + 1)
             << " in n0=" << params.n0 << " steps] = " << p << " < kappa";
          report.failures.push_back({x, "A1", os.str()});
          report.all_pass = false;
        }
      }
    }

    // (A2) / (A2+): moment bounds from the exact one-step table.
    auto atoms = kernel.one_step(x);
    double m2 = 0.0, m2e = 0.0;
    for (const auto& a : atoms) {
      double n2 = norm_sq(a.dx);
      m2 += a.p * n2;
      if (params.eps_plus)
        m2e += a.p * std::pow(n2, 1.0 + *params.eps_plus / 2.0);
    }
    report.max_second_moment = std::max(report.max_second_moment, m2);
    if (m2 > params.B0 + 1e-12) {
      report.failures.push_back({x, "A2", "E||increment||^2 exceeds B0"});
      report.all_pass = false;
    }
    if (params.eps_plus && m2e > params.B0 + 1e-12) {
      report.failures.push_back({x, "A2+", "E||increment||^(2+eps) exceeds B0"});
      report.all_pass = false;
    }

    // Drift conditions beyond radius A0.
    if (params.beta && params.c && params.A0) {
      double r = norm(x);
      if (r > *params.A0) {
        RealVec mu = kernel.mean_drift(x);
        RealVec xr = to_real(x);
        RealVec xhat = unit_vector(xr);
        double radial = dot(mu, xhat);
        double margin = std::pow(r, *params.beta) * radial - *params.c;
        report.worst_radial_margin =
            std::min(report.worst_radial_margin, margin);
        if (margin < -1e-9) {
          report.failures.push_back(
              {x, "radial", "||x||^beta mu.xhat falls below c"});
          report.all_pass = false;
        }
        if (params.delta) {
          double perp2_sq = 0.0;
          for (int i = 0; i < d; ++i) {
            double comp = mu[i] - radial * xhat[i];
            perp2_sq += comp * comp;
          }
          double scaled =
              std::pow(r, *params.beta + *params.delta) * std::sqrt(perp2_sq);
          report.max_transverse_scaled =
              std::max(report.max_transverse_scaled, scaled);
        }
      }
    }
  }
  return report;
}

std::pair<std::int64_t, std::int64_t> normalize_a1_prime(
    std::span<const std::pair<std::int64_t, std::int64_t>> directions) {
  if (directions.size() < 4 || directions.size() % 2 != 0)
    throw std::invalid_argument(
        "normalize_a1_prime: need (k_i, n_i) for all 2d directions");
  std::int64_t n = 1, r = 1;
  for (std::size_t axis = 0; axis * 2 < directions.size(); ++axis) {
    auto [k_pos, n_pos] = directions[2 * axis];
    auto [k_neg, n_neg] = directions[2 * axis + 1];
    if (k_pos < 1 || k_neg < 1 || n_pos < 1 || n_neg < 1)
      throw std::invalid_argument("normalize_a1_prime: all k_i, n_i >= 1");
    // (i) equalize jump counts across the two signs
    std::int64_t n_axis = n_pos * n_neg;
    // (ii) equalize jump sizes via the s_i construction
    std::int64_t k_axis;
    if (k_pos == k_neg) {
      k_axis = k_pos;
    } else {
      k_axis = (k_pos + k_neg) * k_pos * k_neg;
      n_axis *= (k_pos + k_neg) * std::max(k_pos, k_neg);
    }
    n *= n_axis;
    r *= k_axis;
  }
  // (iii)-(iv): k = 2r reached in time n0 = 2nr
  return {2 * r, 2 * n * r};
}

}  // namespace conewalk
