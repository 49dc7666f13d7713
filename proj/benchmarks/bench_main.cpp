#include <benchmark/benchmark.h>

#include "folia/foliation.hpp"
#include "folia/harmonic.hpp"
#include "folia/qdiff.hpp"
#include "folia/rtree.hpp"

namespace {

folia::QuadraticDifferential strip_example() {
  return folia::QuadraticDifferential::rational(
      folia::Poly({folia::Complex(-1), folia::Complex(0), folia::Complex(1)}));
}

void dirichlet_solve_128(benchmark::State& state) {
  folia::CylinderGrid grid{4.0, 128, 128};
  auto f = folia::fourier_boundary({{1.0, 1.0, 0.0}}, grid.ntheta);
  for (auto _ : state) {
    auto field = folia::solve_dirichlet(grid, f, f);
    benchmark::DoNotOptimize(field.values.data());
  }
}
BENCHMARK(dirichlet_solve_128)->Unit(benchmark::kMillisecond);

void separatrix_trace(benchmark::State& state) {
  auto q = strip_example();
  for (auto _ : state) {
    auto t = folia::trace_trajectory(q, folia::Complex(1.001, 0.0),
                                     folia::LeafKind::horizontal);
    benchmark::DoNotOptimize(t.points.data());
  }
}
BENCHMARK(separatrix_trace)->Unit(benchmark::kMillisecond);

void full_decomposition(benchmark::State& state) {
  auto q = strip_example();
  for (auto _ : state) {
    auto sk = folia::strip_decomposition(q);
    benchmark::DoNotOptimize(sk.strips.data());
  }
}
BENCHMARK(full_decomposition)->Unit(benchmark::kMillisecond);

void transverse_measure_segment(benchmark::State& state) {
  auto q = strip_example();
  auto arc = folia::Arc::segment(folia::Complex(-1, 0), folia::Complex(1, 0));
  for (auto _ : state) {
    double mu = folia::transverse_measure(q, arc, 1e-9);
    benchmark::DoNotOptimize(mu);
  }
}
BENCHMARK(transverse_measure_segment)->Unit(benchmark::kMillisecond);

void expansions_v9(benchmark::State& state) {
  for (auto _ : state) {
    auto all = folia::enumerate_expansions(9);
    benchmark::DoNotOptimize(all.data());
  }
}
BENCHMARK(expansions_v9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
