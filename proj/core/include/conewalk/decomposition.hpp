#pragma once

#include <list>
#include <map>
#include <ostream>
#include <vector>

#include "conewalk/kernels.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/vec.hpp"

namespace conewalk {

// One skeleton jump split into the symmetric atom V and the residual zeta.
// Exactly one of the two is nonzero in any realization.
struct DecompositionStep {
  Lattice v;
  Lattice zeta;
  Lattice skeleton_increment;  // = v + zeta
};

struct DecompositionTrace {
  std::vector<Lattice> skeleton_states;  // xi*_0 .. xi*_T
  std::vector<DecompositionStep> steps;  // length T
  std::vector<Lattice> y_partial;        // Y_0 = 0 .. Y_T
  std::vector<Lattice> z_partial;        // Z_0 = 0 .. Z_T
};

// Exact n0-step displacement distribution from x.
std::vector<Atom> skeleton(const Kernel& kernel, int n0,
                           std::span<const std::int64_t> x);

// Sample one skeleton jump via the coupling: V first from the fixed
// symmetric law, then the residual conditioned on V = 0. The marginal law
// of the increment equals the input atom table exactly.
DecompositionStep sample_decomposed_step(std::span<const Atom> skeleton_atoms,
                                         double kappa, int k, int dim,
                                         RngStream& rng);

DecompositionTrace decompose_trajectory(const Kernel& kernel,
                                        const AssumptionParams& params,
                                        std::span<const std::int64_t> x0,
                                        int steps, RngStream& rng);

// Largest kappa valid at the given states: min over states of the minimum
// n0-step probability at the 2d displacements +-k e_i.
double infer_max_kappa(const Kernel& kernel, int n0, int k,
                       std::span<const Lattice> states);

struct ResidualMomentBin {
  double radius_lo, radius_hi;
  int n = 0;
  double mean_sq = 0.0;        // empirical E||zeta||^2 in the bin
  double stderr_sq = 0.0;      // standard error of the mean
  bool flagged = false;        // lower 3-sigma CI exceeds n0^2 B0
};

std::vector<ResidualMomentBin> residual_moment_report(
    const DecompositionTrace& trace, double B0, int n0);

// Memoized per-state skeleton tables with LRU eviction; shared by
// decompose_trajectory so long runs do not re-enumerate.
class SkeletonCache {
 public:
  SkeletonCache(const Kernel& kernel, int n0, std::size_t capacity = 1'000'000);
  const std::vector<Atom>& at(const Lattice& x);

 private:
  const Kernel& kernel_;
  int n0_;
  std::size_t capacity_;
  std::list<Lattice> order_;
  std::map<Lattice, std::pair<std::vector<Atom>, std::list<Lattice>::iterator>>
      table_;
};

void write_trace_csv(const DecompositionTrace& trace, std::ostream& os);

}  // namespace conewalk
