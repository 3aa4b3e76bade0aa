#include <cmath>

#include <benchmark/benchmark.h>

#include "vacflow/degenerate_parabolic.hpp"
#include "vacflow/geometry.hpp"
#include "vacflow/harness.hpp"
#include "vacflow/kappa_solver.hpp"

using namespace vacflow;

namespace {

DiscreteDomain domain_for(const benchmark::State& st) {
  const int dim = static_cast<int>(st.range(0));
  const int n = static_cast<int>(st.range(1));
  return build_domain(dim, n, n + 1);
}

FlowState perturbed_state(const DiscreteDomain& dom) {
  FlowState s = initial_state(smooth_test_velocity(dom));
  s.eta = smooth_test_map(dom, 0.03);
  return s;
}

void BM_Snapshot(benchmark::State& st) {
  const DiscreteDomain dom = domain_for(st);
  const FlowState s = perturbed_state(dom);
  for (auto _ : st) benchmark::DoNotOptimize(snapshot(s));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(dom.size()));
}

void BM_Acceleration(benchmark::State& st) {
  const DiscreteDomain dom = domain_for(st);
  const FlowState s = perturbed_state(dom);
  const DensityProfile p = density_profile(ProfileKind::parabolic, ProfileParams{}, dom);
  for (auto _ : st) benchmark::DoNotOptimize(acceleration(s, p, 0.01));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(dom.size()));
}

void BM_Step(benchmark::State& st) {
  const DiscreteDomain dom = domain_for(st);
  const FlowState s = perturbed_state(dom);
  const DensityProfile p = density_profile(ProfileKind::parabolic, ProfileParams{}, dom);
  SolverConfig config;
  config.kappa = 0.01;
  const double dt = stable_dt(s, p, config);
  for (auto _ : st) benchmark::DoNotOptimize(step(s, p, config, dt));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(dom.size()));
}

void BM_XSolve(benchmark::State& st) {
  const DiscreteDomain dom = domain_for(st);
  const FlowState s = initial_state(VectorField(dom));
  const DensityProfile p = density_profile(ProfileKind::parabolic, ProfileParams{}, dom);
  const int v = dom.vertical_axis();
  const ScalarField X0 = ScalarField::from_function(dom, [v](const Point& x) { return std::sin(M_PI * x[v]); });
  const XProblem problem = frozen_x_problem(s, p, 0.1, [&](double) { return ScalarField(dom); }, X0);
  for (auto _ : st) benchmark::DoNotOptimize(solve_x(problem, 1e-3, 1e-2));
}

}  // namespace

BENCHMARK(BM_Snapshot)->Args({1, 256})->Args({2, 32})->Args({2, 64})->Args({3, 16});
BENCHMARK(BM_Acceleration)->Args({1, 256})->Args({2, 32})->Args({2, 64})->Args({3, 16});
BENCHMARK(BM_Step)->Args({1, 256})->Args({2, 64})->Args({3, 16});
BENCHMARK(BM_XSolve)->Args({1, 256})->Args({2, 32});
BENCHMARK_MAIN();
