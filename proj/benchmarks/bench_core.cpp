#include <benchmark/benchmark.h>

#include "nhhj/hamilton_jacobi.hpp"
#include "nhhj/integrate.hpp"
#include "nhhj/nonholonomic.hpp"
#include "nhhj/sampling.hpp"
#include "nhhj/systems.hpp"

namespace {

using namespace nhhj;

const std::vector<std::string>& names() { return example_names(); }

void BM_VectorField(benchmark::State& state) {
  const ExampleSpec ex = make_example(names()[static_cast<std::size_t>(state.range(0))]);
  const PhaseState z = ex.default_ic;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xh_nh(ex.system, z.q, z.p));
  }
  state.SetLabel(ex.name);
}
BENCHMARK(BM_VectorField)->DenseRange(0, 3);

void BM_VectorFieldFiniteDifference(benchmark::State& state) {
  const ExampleSpec ex = make_example(names()[static_cast<std::size_t>(state.range(0))]);
  const PhaseState z = ex.default_ic;
  const auto fd = DifferentiationStrategy::finite_difference();
  for (auto _ : state) {
    benchmark::DoNotOptimize(xh_nh(ex.system, z.q, z.p, fd));
  }
  state.SetLabel(ex.name);
}
BENCHMARK(BM_VectorFieldFiniteDifference)->DenseRange(0, 3);

void BM_DiskRk4TenSeconds(benchmark::State& state) {
  const ExampleSpec disk = vertical_rolling_disk();
  IntegratorConfig cfg;
  cfg.h = 1e-3;
  cfg.record_stride = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_phase(disk.system, disk.default_ic, {0.0, 10.0}, cfg));
  }
}
BENCHMARK(BM_DiskRk4TenSeconds)->Unit(benchmark::kMillisecond);

void BM_SleighAdaptive(benchmark::State& state) {
  const ExampleSpec sleigh = chaplygin_sleigh();
  IntegratorConfig cfg;
  cfg.method = IntegratorConfig::Method::kAdaptive45;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_phase(sleigh.system, sleigh.default_ic, {0.0, 10.0}, cfg));
  }
}
BENCHMARK(BM_SleighAdaptive)->Unit(benchmark::kMillisecond);

void BM_BracketRank(benchmark::State& state) {
  const ExampleSpec ex = make_example(names()[static_cast<std::size_t>(state.range(0))]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bracket_generating_rank(ex.system.constraints, ex.default_ic.q));
  }
  state.SetLabel(ex.name);
}
BENCHMARK(BM_BracketRank)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_VerifyCandidate(benchmark::State& state) {
  const ExampleSpec ex = snakeboard();
  const auto pts = sample_points(ex.domain_box, static_cast<int>(state.range(0)), 1);
  const OneFormCandidate g = ex.gamma();
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_candidate(ex.system, g, pts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VerifyCandidate)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
