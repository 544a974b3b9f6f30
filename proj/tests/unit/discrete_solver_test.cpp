#include "dataplan/discrete_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dataplan/error.hpp"
#include "dataplan/verification.hpp"
#include "oracles.hpp"

using namespace dataplan;

namespace {

const DemandProfile kProfile{1.0, 13.0, 15.0};
const CostModel kCost = CostModel::affine(10.0, 0.5);

DiscreteMarket case_one() {
  std::vector<double> types;
  for (int i = 0; i < 11; ++i) types.push_back(0.1 + 0.6 * i);
  return DiscreteMarket(types, std::vector<double>(11, 1.0));
}

double revenue(const DiscreteMarket& m, const std::vector<double>& prices) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.count(i) * prices[i];
  return sum;
}

std::vector<ContractItem> menu(const std::vector<double>& periods, const std::vector<double>& prices) {
  std::vector<ContractItem> items;
  for (std::size_t i = 0; i < periods.size(); ++i) items.push_back({periods[i], prices[i]});
  return items;
}

}  // namespace

TEST(OptimalPrices, SingleType) {
  const std::vector<double> p = optimal_prices(std::vector<double>{1.0}, std::vector<double>{2.0}, kProfile);
  EXPECT_NEAR(p[0], 12.8333690588246274032338745229, 1e-12);
}

TEST(OptimalPrices, TwoTypes) {
  const std::vector<double> p = optimal_prices(std::vector<double>{1.0, 4.0}, std::vector<double>{1.0, 2.0}, kProfile);
  EXPECT_NEAR(p[1], 12.9915092973831703624500010739, 1e-12);
  EXPECT_NEAR(p[0], 12.9830221673955569277333816436, 1e-12);
}

TEST(OptimalPrices, EqualPeriodsGiveEqualPrices) {
  const std::vector<double> p =
      optimal_prices(std::vector<double>(4, 1.7), std::vector<double>{0.5, 1.0, 3.0, 4.0}, kProfile);
  for (double x : p) EXPECT_NEAR(x, p.back(), 1e-12);
}

TEST(OptimalPrices, RejectsBadInput) {
  EXPECT_THROW(optimal_prices(std::vector<double>{2.0, 1.0}, std::vector<double>{1.0, 2.0}, kProfile),
               PreconditionError);
  EXPECT_THROW(optimal_prices(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, kProfile), PreconditionError);
}

TEST(TypeObjective, LowestTypeHasNoRentTerm) {
  const DiscreteMarket m({1.0, 2.0}, {3.0, 1.0});
  for (double t : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(type_objective(0, t, m, kProfile, kCost), 3.0 * (valuation(kProfile, 1.0, t) - kCost(t)), 1e-12);
  }
}

TEST(TypeObjective, ReferenceValue) {
  const DiscreteMarket m({1.0, 2.0}, {1.0, 1.0});
  EXPECT_NEAR(type_objective(1, 1.0, m, kProfile, kCost), 2.17522882026608444401774797181, 1e-12);
  EXPECT_THROW(type_objective(1, 0.0, m, kProfile, kCost), DomainError);
}

TEST(TypeObjective, SumsToProfit) {
  oracle::Gen gen(41);
  const DiscreteMarket m({0.4, 1.1, 2.0, 3.7}, {1.0, 2.5, 0.7, 1.3});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(4);
    for (double& x : t) x = gen.uniform(0.05, 4.0);
    std::sort(t.begin(), t.end());
    const std::vector<double> prices = optimal_prices(t, m, kProfile);
    double direct = 0.0;
    double decomposed = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      direct += m.count(i) * (prices[i] - kCost(t[i]));
      decomposed += type_objective(i, t[i], m, kProfile, kCost);
    }
    EXPECT_NEAR(direct, decomposed, 1e-10);
  }
}

TEST(TypeObjective, LowTypeOptimumMatchesDenseScan) {
  const DiscreteMarket m({0.1}, {1.0});
  const auto f = [&](double t) { return type_objective(0, t, m, kProfile, kCost); };
  const Argmax r = maximize_concave(f, 1e-4, 600.0);
  const oracle::ScanResult dense = oracle::dense_scan(f, 1e-3, 10.0, 1e-3);
  EXPECT_GT(r.arg, 1e-4);
  EXPECT_LT(r.arg, 600.0);
  EXPECT_NEAR(r.arg, dense.arg, 1e-3);
  EXPECT_GE(r.value, dense.value);
}

TEST(TypeObjective, ConcaveAlongSearchInterval) {
  const DiscreteMarket m = case_one();
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_NO_THROW(maximize_concave([&](double t) { return type_objective(i, t, m, kProfile, kCost); }, 1e-4, 600.0))
        << "type " << i;
  }
}

TEST(SolveDiscrete, SingleTypeIsMonopolyMenu) {
  const DiscreteMarket m({2.0}, {1.0});
  const DiscreteSolution s = solve_discrete(m, kProfile, kCost);
  const oracle::ScanResult dense =
      oracle::dense_scan([&](double t) { return valuation(kProfile, 2.0, t) - kCost(t); }, 1e-3, 10.0, 1e-4);
  EXPECT_NEAR(s.periods[0], dense.arg, 1e-4);
  EXPECT_NEAR(s.prices[0], valuation(kProfile, 2.0, s.periods[0]), 1e-12);
}

TEST(SolveDiscrete, CaseOneStructure) {
  const DiscreteMarket m = case_one();
  const DiscreteSolution s = solve_discrete(m, kProfile, kCost);
  EXPECT_TRUE(s.pooled_blocks.empty());
  EXPECT_TRUE(s.warnings.empty());
  for (std::size_t i = 1; i < m.size(); ++i) {
    EXPECT_LE(s.periods[i - 1], s.periods[i]);
    // periods and prices move together
    EXPECT_EQ(s.periods[i] > s.periods[i - 1], s.prices[i] > s.prices[i - 1]);
    // adjacent downward constraint binds
    EXPECT_NEAR(s.prices[i - 1] - s.prices[i],
                valuation(kProfile, m.type(i - 1), s.periods[i - 1]) - valuation(kProfile, m.type(i - 1), s.periods[i]),
                1e-12);
  }
  // participation binds only at the top
  EXPECT_NEAR(s.prices.back(), valuation(kProfile, m.types().back(), s.periods.back()), 1e-9);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_GE(consumer_utility(kProfile, m.type(i), {s.periods[i], s.prices[i]}), -1e-9);
  }
  EXPECT_TRUE(feasibility_check(s.items(), m, kProfile).passed);
  EXPECT_TRUE(brute_force_ic_ir(s.items(), assign_discrete(m), kProfile).passed);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += m.count(i) * (s.prices[i] - kCost(s.periods[i]));
  EXPECT_NEAR(sum, s.total_profit, 1e-10);
}

TEST(SolveDiscrete, PoolsReversedCandidates) {
  // A thin middle type sitting on a large population gets pushed to a long
  // period by its rent term, above the heavy type after it.
  const DiscreteMarket m({1.0, 2.0, 3.0}, {1.0, 0.01, 100.0});
  const DiscreteSolution s = solve_discrete(m, kProfile, kCost);
  ASSERT_FALSE(s.pooled_blocks.empty());
  for (const auto& [first, last] : s.pooled_blocks) {
    for (std::size_t k = first; k <= last; ++k) EXPECT_EQ(s.periods[k], s.periods[first]);
  }
  EXPECT_TRUE(feasibility_check(s.items(), m, kProfile).passed);
  EXPECT_TRUE(brute_force_ic_ir(s.items(), assign_discrete(m), kProfile).passed);
  const GridOracleResult grid = grid_oracle_discrete(m, kProfile, kCost, make_grid(0.05, 10.0, 0.05));
  EXPECT_GE(s.total_profit, grid.profit - 1e-9);
}

TEST(SolveDiscrete, ThreadsDoNotChangeResult) {
  const DiscreteMarket m = case_one();
  const DiscreteSolution a = solve_discrete(m, kProfile, kCost, {}, 1);
  const DiscreteSolution b = solve_discrete(m, kProfile, kCost, {}, 4);
  EXPECT_EQ(a.periods, b.periods);
  EXPECT_EQ(a.total_profit, b.total_profit);
}

TEST(SolveDiscrete, WarnsWhenUpperPeriodBinds) {
  const DiscreteMarket m({1.0, 2.0}, {1.0, 1.0});
  const DiscreteSolution s = solve_discrete(m, kProfile, CostModel::affine(10.0, 0.0), PeriodDomain{1e-4, 5.0});
  EXPECT_FALSE(s.warnings.empty());
}

TEST(OptimalPrices, RandomFeasiblePricesNeverBeatThem) {
  oracle::Gen gen(42);
  const DiscreteMarket m = case_one();
  const DiscreteSolution s = solve_discrete(m, kProfile, kCost);
  const double best = revenue(m, s.prices);
  const std::size_t n = m.size();
  for (int trial = 0; trial < 1000; ++trial) {
    // Any feasible menu with these periods: top price at or below its
    // valuation, each price gap inside the adjacent sandwich.
    std::vector<double> prices(n);
    prices[n - 1] = valuation(kProfile, m.type(n - 1), s.periods[n - 1]) - gen.uniform(0.0, 0.05);
    for (std::size_t i = n - 1; i-- > 0;) {
      const double lo = valuation(kProfile, m.type(i), s.periods[i + 1]) - valuation(kProfile, m.type(i), s.periods[i]);
      const double hi =
          valuation(kProfile, m.type(i + 1), s.periods[i + 1]) - valuation(kProfile, m.type(i + 1), s.periods[i]);
      prices[i] = prices[i + 1] - gen.uniform(lo, hi);
    }
    ASSERT_TRUE(feasibility_check(menu(s.periods, prices), m, kProfile).passed);
    EXPECT_LE(revenue(m, prices), best + 1e-9);
  }
}

TEST(FeasibilityCheck, DetectsEachCondition) {
  const DiscreteMarket m = case_one();
  const DiscreteSolution s = solve_discrete(m, kProfile, kCost);
  EXPECT_TRUE(feasibility_check(s.items(), m, kProfile, 1e-9).passed);

  std::vector<ContractItem> bumped = s.items();
  bumped[0].price += 1e-3;
  FeasibilityReport r = feasibility_check(bumped, m, kProfile, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.violated, FeasibilityCondition::kLowerTypeStaysLower);
  EXPECT_EQ(r.index, 0u);

  std::vector<ContractItem> swapped = s.items();
  std::swap(swapped[3].period, swapped[4].period);
  r = feasibility_check(swapped, m, kProfile, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.violated, FeasibilityCondition::kPeriodsAscending);

  std::vector<ContractItem> greedy = s.items();
  greedy.back().price += 1e-3;
  r = feasibility_check(greedy, m, kProfile, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.violated, FeasibilityCondition::kTopTypeParticipation);

  // cutting every price below item 4 by the same amount lures type 4 down
  std::vector<ContractItem> cut = s.items();
  for (std::size_t i = 0; i <= 3; ++i) cut[i].price -= 0.1;
  r = feasibility_check(cut, m, kProfile, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.violated, FeasibilityCondition::kHigherTypeStaysHigher);

  EXPECT_EQ(feasibility_check(std::vector<ContractItem>(3, {1.0, 12.0}), m, kProfile).violated,
            FeasibilityCondition::kSizeMismatch);
}
