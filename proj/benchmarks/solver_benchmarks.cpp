#include <benchmark/benchmark.h>

#include <vector>

#include "dataplan/continuous_solver.hpp"
#include "dataplan/discrete_solver.hpp"
#include "dataplan/market_model.hpp"
#include "dataplan/verification.hpp"

namespace {

using namespace dataplan;

const DemandProfile kProfile{1.0, 13.0, 15.0};
const CostModel kCost = CostModel::affine(10.0, 0.5);

void BM_Valuation(benchmark::State& state) {
  double sigma = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(valuation(kProfile, sigma, 1.7));
    sigma = sigma < 6.0 ? sigma + 1e-3 : 0.5;
  }
}
BENCHMARK(BM_Valuation);

void BM_SolveDiscrete(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> types(n), counts(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) types[i] = 0.1 + 6.0 * static_cast<double>(i) / static_cast<double>(n);
  const DiscreteMarket market(types, counts);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discrete(market, kProfile, kCost).total_profit);
}
BENCHMARK(BM_SolveDiscrete)->Arg(11)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SolveAlternating(benchmark::State& state) {
  const ContinuousMarket market(1.0, UniformDensity{0.0, 6.0});
  AlternatingOptions options;
  options.groups = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_alternating(market, kProfile, kCost, options).total_profit);
}
BENCHMARK(BM_SolveAlternating)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_GridOracleGrouped(benchmark::State& state) {
  const ContinuousMarket market(1.0, UniformDensity{0.0, 6.0});
  const std::vector<double> sigmas = make_grid(0.0, 6.0, 0.05);
  const std::vector<double> periods = make_grid(0.05, 3.5, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_oracle_grouped(market, kProfile, kCost, 2, sigmas, periods).profit);
  }
}
BENCHMARK(BM_GridOracleGrouped)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
