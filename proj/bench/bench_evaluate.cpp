#include <benchmark/benchmark.h>

#include "techroute/evaluation.hpp"
#include "techroute/instances.hpp"

using namespace techroute;

namespace {

const std::vector<NamedInstance>& instances() {
  static const auto set = generate_named_instances(InstanceConfig{}, 16, 1000);
  return set;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const Policy policy = Policy::static_balance(0.33);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(policy, instances()));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const Policy policy = Policy::static_balance(0.33);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(policy, instances()));
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
