#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataplan/market_model.hpp"
#include "dataplan/type_distributions.hpp"

namespace dataplan {

/// Admissible period range for every per-type search. The lower end stands
/// in for t = 0, where the valuation diverges for sigma > 0.
struct PeriodDomain {
  double min_period = 1e-4;
  double max_period = 600.0;
};

struct DiscreteSolution {
  std::vector<double> periods;
  std::vector<double> prices;
  /// Per-type profit contribution P_i at the final period.
  std::vector<double> per_type_objective;
  double total_profit = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pooled_blocks;
  std::vector<std::string> warnings;

  std::vector<ContractItem> items() const;
};

/// Profit-maximizing prices for fixed ascending periods: the highest type is
/// priced at its valuation and each lower type is left exactly indifferent
/// to the next item up,
///   price_I = V(sigma_I, t_I)
///   price_i = price_{i+1} + V(sigma_i, t_i) - V(sigma_i, t_{i+1}).
/// Throws PreconditionError if periods are not ascending or the sizes differ.
std::vector<double> optimal_prices(std::span<const double> periods, std::span<const double> types,
                                   const DemandProfile& profile);
std::vector<double> optimal_prices(std::span<const double> periods, const DiscreteMarket& market,
                                   const DemandProfile& profile);

/// Contribution of type i (0-based) to total profit under optimal prices,
///   N_i V(sigma_i, t) - N_i C(t) + (V(sigma_i, t) - V(sigma_{i-1}, t)) * sum_{n<i} N_n,
/// which depends on t_i alone.
double type_objective(std::size_t i, double t, const DiscreteMarket& market, const DemandProfile& profile,
                      const CostModel& cost);

/// Full pipeline: per-type concave maximization over the period domain,
/// monotone repair of out-of-order periods, then optimal prices.
DiscreteSolution solve_discrete(const DiscreteMarket& market, const DemandProfile& profile, const CostModel& cost,
                                const PeriodDomain& domain = {}, unsigned threads = 1);

enum class FeasibilityCondition {
  kNone,
  kSizeMismatch,
  kPeriodsAscending,        // t_1 <= ... <= t_I
  kTopTypeParticipation,    // price_I <= V(sigma_I, t_I)
  kHigherTypeStaysHigher,   // type i+1 does not prefer item i
  kLowerTypeStaysLower,     // type i does not prefer item i+1
};

const char* to_string(FeasibilityCondition condition);

struct FeasibilityReport {
  bool passed;
  FeasibilityCondition violated;
  /// Index of the first offending item (or adjacent pair's lower index).
  std::size_t index;
  double violation;
};

/// Checks the ordered-menu characterization of incentive compatibility and
/// individual rationality, each inequality with absolute tolerance `tol`.
FeasibilityReport feasibility_check(std::span<const ContractItem> contract, const DiscreteMarket& market,
                                    const DemandProfile& profile, double tol = 1e-9);

}  // namespace dataplan
