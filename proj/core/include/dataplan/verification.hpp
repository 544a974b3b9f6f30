#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataplan/continuous_solver.hpp"
#include "dataplan/discrete_solver.hpp"
#include "dataplan/market_model.hpp"
#include "dataplan/type_distributions.hpp"

namespace dataplan {

// Brute-force incentive compatibility / individual rationality

/// A consumer type and the menu item designed for it; nullopt means the
/// type is meant to stay out of the market.
struct TypeAssignment {
  double sigma;
  std::optional<std::size_t> item;
};

struct ViolatingPair {
  double sigma;
  /// Item the consumer would actually pick (nullopt: stay out).
  std::optional<std::size_t> chosen;
  std::optional<std::size_t> assigned;
};

struct FeasibilityCertificate {
  bool passed = true;
  /// Largest utility gain from deviating to another item (or, for excluded
  /// types, from buying anything at all).
  double worst_ic_violation = 0.0;
  /// Largest negative utility of an assigned item.
  double worst_ir_violation = 0.0;
  std::optional<ViolatingPair> violating_pair;
  std::size_t types_checked = 0;
};

/// Evaluates every sampled type against every item and checks that the
/// assigned item is utility-maximizing and yields non-negative utility,
/// both within `tol`.
FeasibilityCertificate brute_force_ic_ir(std::span<const ContractItem> items,
                                         std::span<const TypeAssignment> assignments, const DemandProfile& profile,
                                         double tol = 1e-9);

std::vector<TypeAssignment> assign_discrete(const DiscreteMarket& market);
std::vector<TypeAssignment> assign_grouped(const GroupedSolution& solution, std::span<const double> sigmas);

/// `count` types drawn uniformly from the market's support (bounded only),
/// deterministic for a given seed.
std::vector<double> sample_types(const ContinuousMarket& market, std::size_t count, std::uint64_t seed);

// Grid oracles

/// lo, lo + step, ... up to hi (inclusive within half a step).
std::vector<double> make_grid(double lo, double hi, double step);

struct GridOracleResult {
  std::vector<double> boundaries;  // grouped only
  std::vector<double> periods;
  double profit;
  /// Number of elementary table updates the search performed.
  std::size_t work;
};

/// Exact maximum of the discrete program over ascending period tuples drawn
/// from `period_grid`, via dynamic programming over the grid. Refuses
/// (BudgetError) when the market has more than 4 types or the grid more
/// than 200 points.
GridOracleResult grid_oracle_discrete(const DiscreteMarket& market, const DemandProfile& profile,
                                      const CostModel& cost, std::span<const double> period_grid);

/// Exact maximum of the grouped program over ascending boundary tuples from
/// `boundary_grid` and ascending period tuples from `period_grid`. Refuses
/// when K > 3 or the table work (K-1) * P(P+1)/2 * S + P * S exceeds 1e8.
GridOracleResult grid_oracle_grouped(const ContinuousMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, std::size_t groups,
                                     std::span<const double> boundary_grid, std::span<const double> period_grid,
                                     unsigned threads = 1);

/// Repeats the exact grouped search on finer grids confined to windows of
/// +-`window` steps around each coordinate of the previous optimum, dividing
/// the step by `factor` each round. The previous optimum stays on the grid,
/// so profit never decreases; a coarse optimum on a grid of spacing h
/// leaves a gap of order h^2 that each round shrinks by factor^2.
GridOracleResult refine_grid_oracle_grouped(const GridOracleResult& coarse, double coarse_step,
                                            const ContinuousMarket& market, const DemandProfile& profile,
                                            const CostModel& cost, int rounds = 2, int factor = 10,
                                            int window = 2, unsigned threads = 1);

// Monte Carlo valuation

struct MonteCarloEstimate {
  double mean;
  double std_error;
  std::size_t samples;
};

/// Simulates period demand D ~ Normal(t mu, sqrt(t) sigma) by inverse-CDF
/// sampling from a seeded 64-bit generator and averages
/// alpha * (mu - max(D - t q, 0) / t).
MonteCarloEstimate monte_carlo_valuation(const DemandProfile& profile, double sigma, double t, std::size_t samples,
                                         std::uint64_t seed);

// Baselines and welfare

enum class BaselinePolicy {
  /// One item at the fixed period, priced so every type in the market buys.
  kFullCoverage,
  /// One item at the fixed period with price and served range chosen to
  /// maximize profit.
  kProfitMaximizing,
};

const char* to_string(BaselinePolicy policy);

struct BaselineResult {
  BaselinePolicy policy;
  double period;
  double price;
  double profit;
  /// Highest type that still buys.
  double marginal_sigma;
  double served_fraction;
};

BaselineResult fixed_period_baseline(const DiscreteMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, double period, BaselinePolicy policy);
BaselineResult fixed_period_baseline(const ContinuousMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, double period, BaselinePolicy policy);

double uplift_percent(double optimal_profit, double baseline_profit);

struct SocialMetrics {
  /// Surplus generated by the contract's period assignment.
  double contract_surplus;
  /// Surplus when every type gets its surplus-maximizing period.
  double max_surplus;
  double ratio;
  /// Surplus-maximizing period per type (discrete markets only).
  std::vector<double> social_periods;
};

SocialMetrics social_metrics(const DiscreteSolution& solution, const DiscreteMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain = {});
SocialMetrics social_metrics(const GroupedSolution& solution, const ContinuousMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain = {});

struct BaselineComparison {
  std::string label;
  BaselineResult baseline;
  double uplift_percent;
};

struct ComparisonReport {
  double optimal_profit;
  std::vector<BaselineComparison> baselines;
  SocialMetrics social;
};

}  // namespace dataplan
