#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "bstab/kernel.hpp"
#include "bstab/norms.hpp"
#include "bstab/simulator.hpp"
#include "bstab/transforms.hpp"

namespace {

using namespace bstab;

ProblemSpec quadratic_spec(double lambda0, double r) {
  ProblemSpec spec;
  spec.lambda0 = lambda0;
  spec.horizon = 2.0;
  spec.family.c1 = Polynomial({0.0, 0.0, r});
  spec.family.f = BivariatePolynomial({{1.0, 0.0}, {0.0, 1.0}});
  return spec;
}

Profile smooth_profile(int grid_m) {
  return Profile::from_function(grid_m, [](double x) { return std::cos(std::numbers::pi * x) + 0.5 * x; });
}

/// One application of the Picard operator.
void BM_PhiOperator(benchmark::State& state) {
  const int n_xi = static_cast<int>(state.range(0));
  const GoursatProblem problem = GoursatProblem::from_spec(quadratic_spec(10.0, 2.0), Orientation::direct);
  const ChartGrid g0 = g_initial_grid(problem, ChartLattice(n_xi));
  for (auto _ : state) benchmark::DoNotOptimize(phi_operator(problem, g0));
}
BENCHMARK(BM_PhiOperator)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

/// Full kernel solve; range(1) toggles Richardson extrapolation.
void BM_SolveKernel(benchmark::State& state) {
  const int n_xi = static_cast<int>(state.range(0));
  PicardOptions options;
  options.richardson = state.range(1) != 0;
  const ProblemSpec spec = quadratic_spec(10.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernel(spec, n_xi, 1e-10, 200, options));
}
BENCHMARK(BM_SolveKernel)->Args({101, 0})->Args({101, 1})->Args({201, 1})->Unit(benchmark::kMillisecond);

void BM_Transforms(benchmark::State& state) {
  const int grid_m = static_cast<int>(state.range(0));
  const ProblemSpec spec = quadratic_spec(3.0, 1.0);
  const int n_xi = 2 * (grid_m - 1) + 1;
  const SampledKernel k(solve_kernel(spec, n_xi), grid_m);
  const SampledKernel l(solve_inverse_kernel(spec, n_xi), grid_m);
  const Profile w = smooth_profile(grid_m);
  for (auto _ : state) benchmark::DoNotOptimize(inverse_transform(forward_transform(w, k), l));
}
BENCHMARK(BM_Transforms)->Arg(101)->Arg(201)->Unit(benchmark::kMicrosecond);

/// Closed-loop Crank-Nicolson run of 100 steps.
void BM_ClosedLoopSteps(benchmark::State& state) {
  const int grid_m = static_cast<int>(state.range(0));
  const ProblemSpec spec = quadratic_spec(3.0, 1.0);
  const SampledKernel k(solve_kernel(spec, 2 * (grid_m - 1) + 1), grid_m);
  const Profile w0 = smooth_profile(grid_m);
  const SimConfig cfg{grid_m, 1e-4, 1e-2, 100, Scheme::crank_nicolson};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_closed_loop(spec, k, w0, cfg));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ClosedLoopSteps)->Arg(101)->Arg(201)->Arg(401)->Unit(benchmark::kMicrosecond);

void BM_AlfNorm(benchmark::State& state) {
  const Profile v = smooth_profile(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(alf(v, 1.5, 1e-3));
}
BENCHMARK(BM_AlfNorm)->Arg(201)->Arg(801);

}  // namespace

BENCHMARK_MAIN();
