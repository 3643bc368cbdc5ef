#include "conewalk/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conewalk {

namespace {

void append_coords(std::ostream& os, const Lattice& x) {
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ";" : "") << x[i];
}

}  // namespace

std::vector<Atom> skeleton(const Kernel& kernel, int n0,
                           std::span<const std::int64_t> x) {
  return nstep_distribution(kernel, n0, x);
}

DecompositionStep sample_decomposed_step(std::span<const Atom> skeleton_atoms,
                                         double kappa, int k, int dim,
                                         RngStream& rng) {
  if (!(kappa > 0.0) || 2 * dim * kappa > 1.0 + 1e-12)
    throw std::invalid_argument("sample_decomposed_step: need 2d*kappa <= 1");

  // Locate the 2d symmetric atoms and check (A1) at this state.
  std::vector<const Atom*> axis_atom(2 * dim, nullptr);
  for (const Atom& a : skeleton_atoms) {
    int nonzero = -1;
    bool pure_axis = true;
    for (int i = 0; i < dim; ++i) {
      if (a.dx[i] == 0) continue;
      if (nonzero >= 0 || std::abs(a.dx[i]) != k) {
        pure_axis = false;
        break;
      }
      nonzero = i;
    }
    if (pure_axis && nonzero >= 0)
      axis_atom[2 * nonzero + (a.dx[nonzero] > 0 ? 0 : 1)] = &a;
  }
  for (int i = 0; i < dim; ++i) {
    for (int sign = 0; sign < 2; ++sign) {
      const Atom* a = axis_atom[2 * i + sign];
      double p = a ? a->p : 0.0;
      if (p + 1e-15 < kappa) {
        std::ostringstream os;
        os << "(A1) violated: skeleton atom " << (sign == 0 ? "+" : "-") << k
           << "e_" << (i + 1) << " has probability " << p << " < kappa=" << kappa;
        throw std::domain_error(os.str());
      }
    }
  }

  double p_zero = 1.0 - 2.0 * dim * kappa;
  DecompositionStep step;
  step.v.assign(dim, 0);
  step.zeta.assign(dim, 0);

  double u = rng.next_double();
  if (u >= p_zero) {
    // V = +-k e_i, each with probability kappa; zeta = 0.
    int slot = static_cast<int>((u - p_zero) / kappa);
    slot = std::min(slot, 2 * dim - 1);
    int axis = slot / 2;
    step.v[axis] = (slot % 2 == 0) ? k : -k;
    step.skeleton_increment = step.v;
    return step;
  }

  // V = 0: draw the residual law q(z) = (p(z) - kappa 1{z = +-k e_i}) / p_zero.
  if (p_zero <= 0.0) {
    double residual_mass = 0.0;
    for (const Atom& a : skeleton_atoms) residual_mass += a.p;
    for (const auto* a : axis_atom)
      if (a) residual_mass -= kappa;
    if (residual_mass > 1e-12)
      throw std::logic_error(
          "sample_decomposed_step: kappa saturates the law but residual mass "
          "remains");
    step.skeleton_increment = step.v;
    return step;
  }
  double v = rng.next_double() * p_zero;
  double acc = 0.0;
  const Atom* chosen = nullptr;
  for (const Atom& a : skeleton_atoms) {
    double q = a.p;
    for (int slot = 0; slot < 2 * dim; ++slot)
      if (axis_atom[slot] == &a) q -= kappa;
    if (q <= 0.0) continue;
    acc += q;
    chosen = &a;
    if (v < acc) break;
  }
  if (chosen == nullptr)
    throw std::logic_error("sample_decomposed_step: empty residual law");
  step.zeta = chosen->dx;
  step.skeleton_increment = step.zeta;
  return step;
}

SkeletonCache::SkeletonCache(const Kernel& kernel, int n0, std::size_t capacity)
    : kernel_(kernel), n0_(n0), capacity_(capacity) {}

const std::vector<Atom>& SkeletonCache::at(const Lattice& x) {
  auto it = table_.find(x);
  if (it != table_.end()) {
    order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }
  if (table_.size() >= capacity_) {
    table_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(x);
  auto [ins, ok] = table_.emplace(
      x, std::make_pair(skeleton(kernel_, n0_, x), order_.begin()));
  (void)ok;
  return ins->second.first;
}

DecompositionTrace decompose_trajectory(const Kernel& kernel,
                                        const AssumptionParams& params,
                                        std::span<const std::int64_t> x0,
                                        int steps, RngStream& rng) {
  int d = kernel.dim();
  DecompositionTrace trace;
  trace.skeleton_states.reserve(steps + 1);
  trace.steps.reserve(steps);
  trace.y_partial.reserve(steps + 1);
  trace.z_partial.reserve(steps + 1);

  Lattice state(x0.begin(), x0.end());
  Lattice y(d, 0), z(d, 0);
  trace.skeleton_states.push_back(state);
  trace.y_partial.push_back(y);
  trace.z_partial.push_back(z);

  SkeletonCache cache(kernel, params.n0);
  for (int t = 0; t < steps; ++t) {
    const auto& atoms = cache.at(state);
    DecompositionStep step;
    try {
      step = sample_decomposed_step(atoms, params.kappa, params.k, d, rng);
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " at state step " +
                              std::to_string(t));
    }
    for (int i = 0; i < d; ++i) {
      state[i] += step.skeleton_increment[i];
      y[i] += step.v[i];
      z[i] += step.zeta[i];
    }
    check_coord_guard(state);
    trace.steps.push_back(std::move(step));
    trace.skeleton_states.push_back(state);
    trace.y_partial.push_back(y);
    trace.z_partial.push_back(z);
  }
  return trace;
}

double infer_max_kappa(const Kernel& kernel, int n0, int k,
                       std::span<const Lattice> states) {
  double kappa = 1.0 / (2.0 * kernel.dim());
  int d = kernel.dim();
  for (const Lattice& x : states) {
    auto atoms = nstep_distribution(kernel, n0, x);
    for (int i = 0; i < d; ++i) {
      for (int sign : {+1, -1}) {
        Lattice target(d, 0);
        target[i] = sign * k;
        double p = 0.0;
        for (const auto& a : atoms)
          if (a.dx == target) p = a.p;
        kappa = std::min(kappa, p);
      }
    }
  }
  return kappa;
}

std::vector<ResidualMomentBin> residual_moment_report(
    const DecompositionTrace& trace, double B0, int n0) {
  if (trace.steps.empty())
    throw std::invalid_argument("residual_moment_report: empty trace");
  double max_r = 1.0;
  for (const auto& s : trace.skeleton_states)
    max_r = std::max(max_r, norm(s));

  // geometric radius bins
  std::vector<ResidualMomentBin> bins;
  for (double lo = 0.0, hi = 16.0; lo < max_r; lo = hi, hi *= 2.0)
    bins.push_back({lo, hi});

  std::vector<std::vector<double>> samples(bins.size());
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    double r = norm(trace.skeleton_states[t]);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (r >= bins[b].radius_lo && r < bins[b].radius_hi) {
        samples[b].push_back(norm_sq(trace.steps[t].zeta));
        break;
      }
    }
  }
  double bound = static_cast<double>(n0) * n0 * B0;
  std::vector<ResidualMomentBin> out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (samples[b].empty()) continue;
    ResidualMomentBin bin = bins[b];
    bin.n = static_cast<int>(samples[b].size());
    double mean = 0.0;
    for (double v : samples[b]) mean += v;
    mean /= bin.n;
    double var = 0.0;
    for (double v : samples[b]) var += (v - mean) * (v - mean);
    var = bin.n > 1 ? var / (bin.n - 1) : 0.0;
    bin.mean_sq = mean;
    bin.stderr_sq = std::sqrt(var / bin.n);
    bin.flagged = mean - 3.0 * bin.stderr_sq > bound;
    out.push_back(bin);
  }
  return out;
}

void write_trace_csv(const DecompositionTrace& trace, std::ostream& os) {
  os << "t,state,v,zeta,y,z\n";
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    os << (t + 1) << ",";
    append_coords(os, trace.skeleton_states[t + 1]);
    os << ",";
    append_coords(os, trace.steps[t].v);
    os << ",";
    append_coords(os, trace.steps[t].zeta);
    os << ",";
    append_coords(os, trace.y_partial[t + 1]);
    os << ",";
    append_coords(os, trace.z_partial[t + 1]);
    os << "\n";
  }
}

}  // namespace conewalk
