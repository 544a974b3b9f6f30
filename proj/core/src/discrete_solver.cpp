#include "dataplan/discrete_solver.hpp"

#include <cmath>
#include <sstream>

#include "dataplan/error.hpp"
#include "dataplan/optimize.hpp"
#include "dataplan/parallel.hpp"

namespace dataplan {
namespace {

void check_ascending(std::span<const double> periods, const char* what) {
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!std::isfinite(periods[i]) || periods[i] <= 0.0) {
      throw PreconditionError(std::string(what) + ": periods must be positive");
    }
    if (i > 0 && periods[i] < periods[i - 1]) {
      throw PreconditionError(std::string(what) + ": periods must be ascending");
    }
  }
}

}  // namespace

std::vector<ContractItem> DiscreteSolution::items() const {
  std::vector<ContractItem> out;
  out.reserve(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) out.push_back({periods[i], prices[i]});
  return out;
}

std::vector<double> optimal_prices(std::span<const double> periods, std::span<const double> types,
                                   const DemandProfile& profile) {
  if (periods.size() != types.size() || periods.empty()) {
    throw PreconditionError("optimal_prices: need one period per type");
  }
  check_ascending(periods, "optimal_prices");
  const std::size_t n = periods.size();
  std::vector<double> prices(n);
  prices[n - 1] = valuation(profile, types[n - 1], periods[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    prices[i] = prices[i + 1] + valuation(profile, types[i], periods[i]) -
                valuation(profile, types[i], periods[i + 1]);
  }
  return prices;
}

std::vector<double> optimal_prices(std::span<const double> periods, const DiscreteMarket& market,
                                   const DemandProfile& profile) {
  return optimal_prices(periods, market.types(), profile);
}

double type_objective(std::size_t i, double t, const DiscreteMarket& market, const DemandProfile& profile,
                      const CostModel& cost) {
  if (i >= market.size()) throw PreconditionError("type_objective: index out of range");
  const double v = valuation(profile, market.type(i), t);
  double value = market.count(i) * (v - cost(t));
  if (i > 0) {
    const double rent_shift = v - valuation(profile, market.type(i - 1), t);
    value += rent_shift * market.count_below(i);
  }
  return value;
}

DiscreteSolution solve_discrete(const DiscreteMarket& market, const DemandProfile& profile, const CostModel& cost,
                                const PeriodDomain& domain, unsigned threads) {
  const std::size_t n = market.size();
  const auto objective = [&](std::size_t i, double t) { return type_objective(i, t, market, profile, cost); };

  std::vector<double> candidates(n);
  parallel_for(n, threads, [&](std::size_t i) {
    candidates[i] =
        maximize_concave([&](double t) { return objective(i, t); }, domain.min_period, domain.max_period).arg;
  });

  MonotoneRepair repaired = repair_monotone(candidates, objective, [&](const Objective& f) {
    return maximize_concave(f, domain.min_period, domain.max_period);
  });

  DiscreteSolution solution;
  solution.periods = std::move(repaired.values);
  solution.pooled_blocks = std::move(repaired.pooled_blocks);
  solution.prices = optimal_prices(solution.periods, market, profile);
  solution.per_type_objective.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    solution.per_type_objective[i] = objective(i, solution.periods[i]);
    solution.total_profit += market.count(i) * (solution.prices[i] - cost(solution.periods[i]));
    if (solution.periods[i] >= domain.max_period * (1.0 - 1e-9)) {
      std::ostringstream msg;
      msg << "type " << i << ": period hit the search upper bound " << domain.max_period;
      solution.warnings.push_back(msg.str());
    }
  }
  return solution;
}

const char* to_string(FeasibilityCondition condition) {
  switch (condition) {
    case FeasibilityCondition::kNone: return "none";
    case FeasibilityCondition::kSizeMismatch: return "size_mismatch";
    case FeasibilityCondition::kPeriodsAscending: return "periods_ascending";
    case FeasibilityCondition::kTopTypeParticipation: return "top_type_participation";
    case FeasibilityCondition::kHigherTypeStaysHigher: return "higher_type_stays_higher";
    case FeasibilityCondition::kLowerTypeStaysLower: return "lower_type_stays_lower";
  }
  return "unknown";
}

FeasibilityReport feasibility_check(std::span<const ContractItem> contract, const DiscreteMarket& market,
                                    const DemandProfile& profile, double tol) {
  const std::size_t n = market.size();
  if (contract.size() != n) return {false, FeasibilityCondition::kSizeMismatch, 0, 0.0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double drop = contract[i].period - contract[i + 1].period;
    if (drop > tol) return {false, FeasibilityCondition::kPeriodsAscending, i, drop};
  }
  const double top_excess =
      contract[n - 1].price - valuation(profile, market.type(n - 1), contract[n - 1].period);
  if (top_excess > tol) return {false, FeasibilityCondition::kTopTypeParticipation, n - 1, top_excess};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const ContractItem& lo = contract[i];
    const ContractItem& hi = contract[i + 1];
    const double floor = hi.price + valuation(profile, market.type(i + 1), lo.period) -
                         valuation(profile, market.type(i + 1), hi.period);
    if (floor - lo.price > tol) {
      return {false, FeasibilityCondition::kHigherTypeStaysHigher, i, floor - lo.price};
    }
    const double ceiling =
        hi.price + valuation(profile, market.type(i), lo.period) - valuation(profile, market.type(i), hi.period);
    if (lo.price - ceiling > tol) {
      return {false, FeasibilityCondition::kLowerTypeStaysLower, i, lo.price - ceiling};
    }
  }
  return {true, FeasibilityCondition::kNone, 0, 0.0};
}

}  // namespace dataplan
