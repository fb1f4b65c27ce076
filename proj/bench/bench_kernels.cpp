// Serial reference vs OpenMP for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "conicsv/gridapp.hpp"
#include "conicsv/instances.hpp"
#include "conicsv/oracle.hpp"
#include "conicsv/rng.hpp"

using namespace conicsv;

namespace {

Backend backend_of(const benchmark::State& st) { return st.range(0) ? Backend::OpenMP : Backend::Serial; }

void BM_GridOracle(benchmark::State& st) {
  const Instance inst = gaussian_inequality_instance(3, 3, 2, 11);
  const double res = 1.0 / static_cast<double>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(grid_oracle(inst.a, inst.cone, res, backend_of(st)).value);
}
BENCHMARK(BM_GridOracle)->ArgsProduct({{0, 1}, {100, 300}})->Unit(benchmark::kMillisecond);

void BM_SphereQpScan(benchmark::State& st) {
  Vector l(3), g(3);
  l << 0.5, 1.0, 3.0;
  g << 0.3, -0.2, 0.7;
  const double res = 1.0 / static_cast<double>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(sphere_qp_scan(l, g, res, backend_of(st)));
}
BENCHMARK(BM_SphereQpScan)->ArgsProduct({{0, 1}, {100, 1000}})->Unit(benchmark::kMillisecond);

void BM_GreedyDesign(benchmark::State& st) {
  SplitMix64 rng(5);
  const Index L = st.range(1);
  MeasurementModel m;
  for (Index l = 0; l < L; ++l) {
    ComplexMatrix H(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) H(i, j) = {rng.normal(), rng.normal()};
    m.h_list.push_back(0.5 * (H + H.adjoint()));
  }
  const auto model = realify(m);
  const Vector w0 = to_structured_vector(Matrix::Identity(6, 6), 3);
  for (auto _ : st) benchmark::DoNotOptimize(greedy_design(model, w0, L / 2, backend_of(st)).sum());
}
BENCHMARK(BM_GreedyDesign)->ArgsProduct({{0, 1}, {12, 24}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
