#include <benchmark/benchmark.h>

#include "conewalk/decomposition.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/kernels.hpp"

using namespace conewalk;

namespace {

std::unique_ptr<Kernel> kernel_for(int which) {
  KernelSpec spec;
  spec.dim = 2;
  switch (which) {
    case 0: spec.variant = KernelVariant::ZeroDrift; break;
    case 1:
      spec.variant = KernelVariant::RadialDrift;
      spec.c = 1.0;
      spec.beta = 0.5;
      break;
    case 2: spec.variant = KernelVariant::HalfPlaneExcursion; break;
    default:
      spec.variant = KernelVariant::Rwre;
      spec.env_seed = 1;
      break;
  }
  return make_kernel(spec);
}

void BM_kernel_step(benchmark::State& state) {
  auto kernel = kernel_for(static_cast<int>(state.range(0)));
  RngStream rng(RngStream::derive_key(1, 0, 0));
  Lattice x{1000, 0};
  for (auto _ : state) {
    kernel->sample_step(x, rng);
    if (x[0] < 1) x[0] = 1000;  // keep restricted kernels in range
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_kernel_step)->DenseRange(0, 3);

void BM_h_nu(benchmark::State& state) {
  RealVec x{523.0, 41.0};
  double acc = 0.0;
  for (auto _ : state) acc += h_nu(0.05, x);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_h_nu);

void BM_skeleton_enumeration(benchmark::State& state) {
  auto kernel = kernel_for(1);
  int n0 = static_cast<int>(state.range(0));
  Lattice x{100, 7};
  for (auto _ : state) {
    auto atoms = skeleton(*kernel, n0, x);
    benchmark::DoNotOptimize(atoms.data());
  }
}
BENCHMARK(BM_skeleton_enumeration)->Arg(1)->Arg(2)->Arg(4);

void BM_decomposed_step(benchmark::State& state) {
  auto kernel = kernel_for(0);
  auto atoms = skeleton(*kernel, 1, Lattice{0, 0});
  RngStream rng(RngStream::derive_key(2, 0, 0));
  for (auto _ : state) {
    auto step = sample_decomposed_step(atoms, 0.125, 1, 2, rng);
    benchmark::DoNotOptimize(step.v.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_decomposed_step);

}  // namespace

BENCHMARK_MAIN();
