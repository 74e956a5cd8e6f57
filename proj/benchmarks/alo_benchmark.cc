// Micro benchmarks for the model builder, the serializers and the solvers.
// Generated instances use the default size split, so n_l grows as n * N^2.

#include <benchmark/benchmark.h>

#include "alo/bench.h"
#include "alo/cgopt.h"
#include "alo/instance.h"
#include "alo/model.h"
#include "alo/solver.h"
#include "alo/system_io.h"

namespace alo {
namespace {

Instance Generated(int n, int bin_count, std::uint64_t seed = 7) {
  SizeSplit split = SplitSizes(n);
  GeneratorConfig gen;
  gen.n1 = split.n1;
  gen.n2 = split.n2;
  gen.n3 = split.n3;
  gen.bin_count = bin_count;
  gen.seed = seed;
  return GenerateInstance(gen);
}

void BM_BuildConstraints(benchmark::State& state) {
  const int bins = static_cast<int>(state.range(0));
  Instance inst = Generated(bins, bins);
  std::size_t nnz = 0;
  for (auto _ : state) {
    ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
    nnz = CountNonzeros(sys);
    benchmark::DoNotOptimize(sys);
  }
  state.counters["n_l"] = static_cast<double>(nnz);
  state.SetComplexityN(static_cast<std::int64_t>(nnz));
}
BENCHMARK(BM_BuildConstraints)->RangeMultiplier(2)->Range(10, 80)->Complexity();

void BM_WriteMps(benchmark::State& state) {
  Instance inst = AirbusReferenceInstance();
  ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
  for (auto _ : state) {
    std::string text = WriteMps(sys);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(BM_WriteMps);

void BM_ReadMps(benchmark::State& state) {
  Instance inst = AirbusReferenceInstance();
  const std::string text = WriteMps(BuildConstraints(inst.spec, inst.payload));
  for (auto _ : state) {
    ConstraintSystem sys = ReadMps(text);
    benchmark::DoNotOptimize(sys);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ReadMps);

void BM_GenerateMasses(benchmark::State& state) {
  GeneratorConfig gen;
  gen.n1 = gen.n2 = gen.n3 = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ++gen.seed;
    Payload p = GenerateMasses(gen);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * 3 * state.range(0));
}
BENCHMARK(BM_GenerateMasses)->Arg(100)->Arg(10000);

// Exact solvers on small generated instances; the search tree is at most
// (N + 1)^n leaves.
void BM_Exhaustive(benchmark::State& state) {
  Instance inst = Generated(static_cast<int>(state.range(0)), 4);
  ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
  for (auto _ : state) {
    SolveReport r = SolveExhaustive(sys, inst.payload, inst.spec);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Exhaustive)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_BranchAndBound(benchmark::State& state) {
  Instance inst = Generated(static_cast<int>(state.range(0)), 4);
  ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
  SolveConfig cfg;
  cfg.mode = SolveMode::kBranchAndBound;
  cfg.tau = 1;
  for (auto _ : state) {
    SolveReport r = SolveBranchAndBound(sys, inst.payload, inst.spec, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_BranchAndBound)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

// Threshold descent to 99% of W_max on the reference instance.
void BM_ThresholdDescentReference(benchmark::State& state) {
  Instance inst = AirbusReferenceInstance();
  ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
  SolveConfig cfg;
  cfg.mode = SolveMode::kThresholdDescent;
  cfg.tau = 0.99;
  cfg.clock = ClockKind::kSteps;
  for (auto _ : state) {
    ++cfg.seed;
    SolveReport r = SolveThresholdDescent(sys, inst.payload, inst.spec, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ThresholdDescentReference)->Unit(benchmark::kMicrosecond);

// Threshold descent to tau = 0.999 on generated instances with n = N.
void BM_ThresholdDescentScaling(benchmark::State& state) {
  const int bins = static_cast<int>(state.range(0));
  Instance inst = Generated(bins, bins);
  ConstraintSystem sys = BuildConstraints(inst.spec, inst.payload);
  SolveConfig cfg;
  cfg.mode = SolveMode::kThresholdDescent;
  cfg.tau = 0.999;
  cfg.clock = ClockKind::kSteps;
  cfg.time_budget = 10;
  for (auto _ : state) {
    SolveReport r = SolveThresholdDescent(sys, inst.payload, inst.spec, cfg);
    benchmark::DoNotOptimize(r);
  }
  state.counters["n_l"] = static_cast<double>(CountNonzeros(sys));
}
BENCHMARK(BM_ThresholdDescentScaling)->RangeMultiplier(2)->Range(10, 80)
    ->Unit(benchmark::kMillisecond);

void BM_OptimizeCgSequence(benchmark::State& state) {
  Instance inst = AirbusReferenceInstance();
  CgOptConfig cfg;
  cfg.tau = 0.998;
  cfg.epsilon = Rational::Parse("0.001");
  SolveConfig stages;
  stages.mode = SolveMode::kThresholdDescent;
  stages.tau = 1;
  stages.clock = ClockKind::kSteps;
  stages.time_budget = 1;
  for (auto _ : state) {
    CgOptReport r = OptimizeCgSequence(inst, cfg, stages);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_OptimizeCgSequence)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace alo

BENCHMARK_MAIN();
