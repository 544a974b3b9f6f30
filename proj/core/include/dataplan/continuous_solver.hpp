#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataplan/discrete_solver.hpp"
#include "dataplan/market_model.hpp"
#include "dataplan/optimize.hpp"
#include "dataplan/type_distributions.hpp"

namespace dataplan {

/// Menu for a continuum of types split into K groups. Group k (0-based)
/// covers (boundaries[k-1], boundaries[k]] with boundaries[-1] = sigma_min;
/// types above boundaries[K-1] are not served.
struct GroupedSolution {
  std::vector<double> boundaries;
  std::vector<double> periods;
  std::vector<double> prices;
  std::vector<double> counts;
  double total_profit = 0.0;
  int iterations = 0;
  bool converged = false;
  bool regularity_holds = true;
  /// Profit after every period step and every boundary step of the winning run.
  std::vector<double> profit_trace;
  std::vector<std::string> warnings;

  std::vector<ContractItem> items() const;
  /// Copy with empty groups (zero consumers) removed.
  GroupedSolution collapsed() const;
  /// Index of the group serving `sigma`, or nullopt when sigma is above the
  /// top boundary.
  std::optional<std::size_t> group_of(double sigma) const;
};

/// N_k = N (G(sigma_k) - G(sigma_{k-1})) with sigma_{-1} = sigma_min.
std::vector<double> group_counts(const ContinuousMarket& market, std::span<const double> boundaries);

/// Price chain that leaves each group's top type indifferent between its own
/// item and the next one up, with the top group's boundary type priced at
/// its valuation.
std::vector<double> optimal_prices_grouped(std::span<const double> boundaries, std::span<const double> periods,
                                           const DemandProfile& profile);

/// Provider profit sum_k N_k (price_k - C(t_k)) under optimal prices.
double grouped_profit(std::span<const double> boundaries, std::span<const double> periods,
                      const ContinuousMarket& market, const DemandProfile& profile, const CostModel& cost);

/// Group k's profit contribution as a function of its own period, with
/// boundaries fixed:
///   N_k V(sigma_k, t) - N_k C(t) + (V(sigma_k, t) - V(sigma_{k-1}, t)) * sum_{s<k} N_s.
double group_objective(std::size_t k, double t, std::span<const double> boundaries, const ContinuousMarket& market,
                       const DemandProfile& profile, const CostModel& cost);

/// Boundary k's profit contribution as a function of its own position, with
/// periods fixed:
///   k < K-1:  N G(sigma) (V(sigma, t_k) - V(sigma, t_{k+1}) + C(t_{k+1}) - C(t_k))
///   k = K-1:  N G(sigma) (V(sigma, t_K) - C(t_K))
/// Summing over k gives the total profit.
double boundary_objective(std::size_t k, double sigma, std::span<const double> periods,
                          const ContinuousMarket& market, const DemandProfile& profile, const CostModel& cost);

/// Marginal term of boundary objective k < K-1:
///   V(sigma, t_k) - V(sigma, t_{k+1}) + G/g * (V_sigma(sigma, t_k) - V_sigma(sigma, t_{k+1})),
/// so that dQ_k/dsigma = N g (H_k + C(t_{k+1}) - C(t_k)).
double h_function(std::size_t k, double sigma, std::span<const double> periods, const DemandProfile& profile,
                  const ContinuousMarket& market);

/// Period step: optimal ascending periods for fixed boundaries.
MonotoneRepair step1_periods(std::span<const double> boundaries, const ContinuousMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain = {},
                             unsigned threads = 1);

/// Boundary step: optimal ascending boundaries for fixed periods. When
/// `unimodal` is false each search falls back to a grid scan plus local
/// refinement.
MonotoneRepair step2_boundaries(std::span<const double> periods, const ContinuousMarket& market,
                                const DemandProfile& profile, const CostModel& cost, bool unimodal = true,
                                unsigned threads = 1);

struct AlternatingOptions {
  std::size_t groups = 1;
  /// Starting boundaries; defaults to the k/K quantiles of the type
  /// distribution.
  std::optional<std::vector<double>> initial_boundaries;
  /// Extra runs from seeded random quantile starts; the best run wins.
  std::size_t restarts = 0;
  std::uint64_t seed = 1;
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
  PeriodDomain domain;
  unsigned threads = 1;
};

/// Alternates the period and boundary steps until the relative profit improvement over
/// a full iteration drops to the tolerance or the iteration cap is hit.
GroupedSolution solve_alternating(const ContinuousMarket& market, const DemandProfile& profile,
                                  const CostModel& cost, const AlternatingOptions& options);

/// Quantile starting point sigma_k = G^{-1}((k+1)/K).
std::vector<double> quantile_boundaries(const ContinuousMarket& market, std::size_t groups);

/// Whether a profit trace never decreases by more than slack * max(1, |R|).
bool is_nondecreasing(std::span<const double> trace, double slack = 1e-12);

}  // namespace dataplan
