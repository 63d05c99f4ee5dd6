// Serial reference kernels against the OpenMP kernels on the default grid sizes.

#include <benchmark/benchmark.h>

#include <random>

#include "vortexlab/functional.hpp"
#include "vortexlab/parallel.hpp"

using namespace vortexlab;

namespace {

struct Setup {
  explicit Setup(int n)
      : params{2, 1.0, 1.0, 1.0, true},
        f(PlanarGrid::make(15.0, n), BackgroundField(params), coupling_matrix(params)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    w = FieldPair::zeros(f.grid());
    d = FieldPair::zeros(f.grid());
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
      w.w1[k] = dist(rng);
      w.w2[k] = dist(rng);
      d.w1[k] = dist(rng);
      d.w2[k] = dist(rng);
    }
    f.apply_boundary(w);
  }
  ModelParams params;
  DiscreteFunctional f;
  FieldPair w, d;
};

void BM_energy_reference(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::energy(s.f, s.w));
}

void BM_energy_parallel(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.f.energy(s.w));
  state.counters["threads"] = thread_count();
}

void BM_gradient_reference(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::gradient(s.f, s.w));
}

void BM_gradient_parallel(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.f.gradient(s.w));
  state.counters["threads"] = thread_count();
}

void BM_hessian_reference(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::hessian_apply(s.f, s.w, s.d));
}

void BM_hessian_parallel(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  const LocalHessian lh = s.f.local_hessian(s.w);
  FieldPair out = FieldPair::zeros(s.f.grid());
  for (auto _ : state) {
    s.f.hessian_apply(lh, s.d, out);
    benchmark::DoNotOptimize(out.w1.data());
  }
  state.counters["threads"] = thread_count();
}

}  // namespace

BENCHMARK(BM_energy_reference)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_energy_parallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_reference)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_parallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hessian_reference)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hessian_parallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
