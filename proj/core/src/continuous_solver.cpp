#include "dataplan/continuous_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dataplan/error.hpp"
#include "dataplan/parallel.hpp"

namespace dataplan {
namespace {

void check_boundaries(std::span<const double> boundaries, const ContinuousMarket& market, const char* what) {
  if (boundaries.empty()) throw PreconditionError(std::string(what) + ": need at least one group");
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    if (!(boundaries[k] >= market.sigma_min() && boundaries[k] <= market.sigma_max())) {
      throw PreconditionError(std::string(what) + ": boundary outside the type support");
    }
    if (k > 0 && boundaries[k] < boundaries[k - 1]) {
      throw PreconditionError(std::string(what) + ": boundaries must be ascending");
    }
  }
}

void check_periods(std::span<const double> periods, const char* what) {
  if (periods.empty()) throw PreconditionError(std::string(what) + ": need at least one period");
  for (std::size_t k = 0; k < periods.size(); ++k) {
    if (!(periods[k] > 0.0) || !std::isfinite(periods[k])) {
      throw PreconditionError(std::string(what) + ": periods must be positive");
    }
    if (k > 0 && periods[k] < periods[k - 1]) {
      throw PreconditionError(std::string(what) + ": periods must be ascending");
    }
  }
}

// Group objective that is identically zero: an empty group whose boundary
// coincides with the previous one, or with nobody below it.
bool degenerate_group(std::size_t k, std::span<const double> boundaries, std::span<const double> counts) {
  if (counts[k] > 0.0) return false;
  if (k == 0) return true;
  return boundaries[k] == boundaries[k - 1];
}

}  // namespace

std::vector<ContractItem> GroupedSolution::items() const {
  std::vector<ContractItem> out;
  out.reserve(periods.size());
  for (std::size_t k = 0; k < periods.size(); ++k) out.push_back({periods[k], prices[k]});
  return out;
}

GroupedSolution GroupedSolution::collapsed() const {
  GroupedSolution out = *this;
  out.boundaries.clear();
  out.periods.clear();
  out.prices.clear();
  out.counts.clear();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] <= 0.0) continue;
    out.boundaries.push_back(boundaries[k]);
    out.periods.push_back(periods[k]);
    out.prices.push_back(prices[k]);
    out.counts.push_back(counts[k]);
  }
  return out;
}

std::optional<std::size_t> GroupedSolution::group_of(double sigma) const {
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    if (sigma <= boundaries[k] && counts[k] > 0.0) return k;
  }
  return std::nullopt;
}

std::vector<double> group_counts(const ContinuousMarket& market, std::span<const double> boundaries) {
  check_boundaries(boundaries, market, "group_counts");
  std::vector<double> counts(boundaries.size());
  double below = market.sigma_min();
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    counts[k] = market.count_between(below, boundaries[k]);
    below = boundaries[k];
  }
  return counts;
}

std::vector<double> optimal_prices_grouped(std::span<const double> boundaries, std::span<const double> periods,
                                           const DemandProfile& profile) {
  if (boundaries.size() != periods.size()) {
    throw PreconditionError("optimal_prices_grouped: need one period per group");
  }
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (boundaries[k] < boundaries[k - 1]) {
      throw PreconditionError("optimal_prices_grouped: boundaries must be ascending");
    }
  }
  return optimal_prices(periods, boundaries, profile);
}

double grouped_profit(std::span<const double> boundaries, std::span<const double> periods,
                      const ContinuousMarket& market, const DemandProfile& profile, const CostModel& cost) {
  const std::vector<double> counts = group_counts(market, boundaries);
  const std::vector<double> prices = optimal_prices_grouped(boundaries, periods, profile);
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) total += counts[k] * (prices[k] - cost(periods[k]));
  return total;
}

double group_objective(std::size_t k, double t, std::span<const double> boundaries, const ContinuousMarket& market,
                       const DemandProfile& profile, const CostModel& cost) {
  if (k >= boundaries.size()) throw PreconditionError("group_objective: group index out of range");
  const double lower = k == 0 ? market.sigma_min() : boundaries[k - 1];
  const double n_k = market.count_between(lower, boundaries[k]);
  const double v = valuation(profile, boundaries[k], t);
  double value = n_k * (v - cost(t));
  if (k > 0) {
    const double below = market.count_between(market.sigma_min(), lower);
    value += (v - valuation(profile, lower, t)) * below;
  }
  return value;
}

double boundary_objective(std::size_t k, double sigma, std::span<const double> periods,
                          const ContinuousMarket& market, const DemandProfile& profile, const CostModel& cost) {
  if (k >= periods.size()) throw PreconditionError("boundary_objective: group index out of range");
  const double served = market.total() * market.cdf(sigma);
  if (k + 1 == periods.size()) {
    return served * (valuation(profile, sigma, periods[k]) - cost(periods[k]));
  }
  const double t_lo = periods[k];
  const double t_hi = periods[k + 1];
  return served * (valuation(profile, sigma, t_lo) - valuation(profile, sigma, t_hi) + cost(t_hi) - cost(t_lo));
}

double h_function(std::size_t k, double sigma, std::span<const double> periods, const DemandProfile& profile,
                  const ContinuousMarket& market) {
  if (k + 1 >= periods.size()) throw PreconditionError("h_function: defined for k < K-1 only");
  const double g = market.pdf(sigma);
  if (!(g > 0.0)) throw DomainError("h_function: density vanishes at sigma");
  const double t_lo = periods[k];
  const double t_hi = periods[k + 1];
  const double level = valuation(profile, sigma, t_lo) - valuation(profile, sigma, t_hi);
  const double slope =
      valuation_dsigma(profile, sigma, t_lo).value - valuation_dsigma(profile, sigma, t_hi).value;
  return level + market.cdf(sigma) / g * slope;
}

MonotoneRepair step1_periods(std::span<const double> boundaries, const ContinuousMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain,
                             unsigned threads) {
  check_boundaries(boundaries, market, "step1_periods");
  const std::size_t groups = boundaries.size();
  const std::vector<double> counts = group_counts(market, boundaries);

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < groups; ++k) {
    if (!degenerate_group(k, boundaries, counts)) active.push_back(k);
  }

  MonotoneRepair result;
  result.values.assign(groups, 0.0);
  if (active.empty()) {
    // Nobody is served; any common period is optimal.
    const double t = maximize_concave(
                         [&](double t) { return valuation(profile, boundaries.back(), t) - cost(t); },
                         domain.min_period, domain.max_period)
                         .arg;
    result.values.assign(groups, t);
    return result;
  }

  const auto objective = [&](std::size_t j, double t) {
    return group_objective(active[j], t, boundaries, market, profile, cost);
  };
  std::vector<double> candidates(active.size());
  parallel_for(active.size(), threads, [&](std::size_t j) {
    candidates[j] =
        maximize_concave([&](double t) { return objective(j, t); }, domain.min_period, domain.max_period).arg;
  });
  MonotoneRepair repaired = repair_monotone(candidates, objective, [&](const Objective& f) {
    return maximize_concave(f, domain.min_period, domain.max_period);
  });

  // Empty groups take their left neighbour's period (right neighbour for a
  // leading run); their objective is flat so this keeps optimality.
  std::vector<bool> filled(groups, false);
  for (std::size_t j = 0; j < active.size(); ++j) {
    result.values[active[j]] = repaired.values[j];
    filled[active[j]] = true;
  }
  const double first_value = repaired.values.front();
  for (std::size_t k = 0; k < groups; ++k) {
    if (!filled[k]) result.values[k] = k < active.front() ? first_value : result.values[k - 1];
  }
  for (const auto& [first, last] : repaired.pooled_blocks) {
    result.pooled_blocks.emplace_back(active[first], active[last]);
  }
  return result;
}

MonotoneRepair step2_boundaries(std::span<const double> periods, const ContinuousMarket& market,
                                const DemandProfile& profile, const CostModel& cost, bool unimodal,
                                unsigned threads) {
  check_periods(periods, "step2_boundaries");
  if (!market.bounded()) throw PreconditionError("step2_boundaries: type support must be bounded");
  const double lo = market.sigma_min();
  const double hi = market.sigma_max();
  const auto maximize = [&](const Objective& f) {
    return unimodal ? maximize_unimodal(f, lo, hi) : maximize_by_scan(f, lo, hi, 2000);
  };
  const auto objective = [&](std::size_t k, double sigma) {
    return boundary_objective(k, sigma, periods, market, profile, cost);
  };
  std::vector<double> candidates(periods.size());
  parallel_for(periods.size(), threads, [&](std::size_t k) {
    candidates[k] = maximize([&](double sigma) { return objective(k, sigma); }).arg;
  });
  return repair_monotone(candidates, objective, maximize);
}

std::vector<double> quantile_boundaries(const ContinuousMarket& market, std::size_t groups) {
  if (groups == 0) throw PreconditionError("quantile_boundaries: need at least one group");
  std::vector<double> out(groups);
  for (std::size_t k = 0; k < groups; ++k) {
    out[k] = market.quantile(static_cast<double>(k + 1) / static_cast<double>(groups));
  }
  return out;
}

bool is_nondecreasing(std::span<const double> trace, double slack) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1] - slack * std::max(1.0, std::abs(trace[i - 1]))) return false;
  }
  return true;
}

namespace {

GroupedSolution run_alternation(std::vector<double> boundaries, const ContinuousMarket& market,
                                const DemandProfile& profile, const CostModel& cost,
                                const AlternatingOptions& options, bool unimodal) {
  GroupedSolution run;
  run.regularity_holds = unimodal;
  std::vector<double> periods;
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    periods = step1_periods(boundaries, market, profile, cost, options.domain, options.threads).values;
    run.profit_trace.push_back(grouped_profit(boundaries, periods, market, profile, cost));
    boundaries = step2_boundaries(periods, market, profile, cost, unimodal, options.threads).values;
    const double profit = grouped_profit(boundaries, periods, market, profile, cost);
    run.profit_trace.push_back(profit);
    run.iterations = iter;
    if (profit - previous <= options.relative_tolerance * std::abs(profit)) {
      run.converged = true;
      break;
    }
    previous = profit;
  }
  run.boundaries = std::move(boundaries);
  run.periods = std::move(periods);
  run.counts = group_counts(market, run.boundaries);
  run.prices = optimal_prices_grouped(run.boundaries, run.periods, profile);
  run.total_profit = grouped_profit(run.boundaries, run.periods, market, profile, cost);
  if (!run.converged) {
    run.warnings.push_back("alternating maximization hit the iteration cap of " +
                           std::to_string(options.max_iterations));
  }
  if (!is_nondecreasing(run.profit_trace)) {
    run.warnings.push_back("profit trace decreased between steps");
  }
  return run;
}

}  // namespace

GroupedSolution solve_alternating(const ContinuousMarket& market, const DemandProfile& profile,
                                  const CostModel& cost, const AlternatingOptions& options) {
  if (options.groups == 0) throw PreconditionError("solve_alternating: need at least one group");
  if (!market.bounded()) throw PreconditionError("solve_alternating: type support must be bounded");
  const RegularityReport regularity = verify_boundary_regularity(market, 1000);

  std::vector<std::vector<double>> starts;
  if (options.initial_boundaries) {
    if (options.initial_boundaries->size() != options.groups) {
      throw PreconditionError("solve_alternating: initial boundaries do not match the group count");
    }
    check_boundaries(*options.initial_boundaries, market, "solve_alternating");
    starts.push_back(*options.initial_boundaries);
  } else {
    starts.push_back(quantile_boundaries(market, options.groups));
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::vector<double> quantiles(options.groups);
    for (double& p : quantiles) p = unit(rng);
    std::sort(quantiles.begin(), quantiles.end());
    std::vector<double> start(options.groups);
    for (std::size_t k = 0; k < options.groups; ++k) start[k] = market.quantile(quantiles[k]);
    starts.push_back(std::move(start));
  }

  std::vector<GroupedSolution> runs(starts.size());
  AlternatingOptions inner = options;
  inner.threads = starts.size() > 1 ? 1 : options.threads;
  parallel_for(starts.size(), starts.size() > 1 ? options.threads : 1, [&](std::size_t r) {
    runs[r] = run_alternation(starts[r], market, profile, cost, inner, regularity.holds);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].total_profit > runs[best].total_profit) best = r;
  }
  GroupedSolution solution = std::move(runs[best]);
  if (!regularity.holds) {
    std::ostringstream msg;
    msg << "type distribution violates the boundary regularity condition (min slack " << regularity.min_slack
        << " at sigma = " << regularity.argmin_sigma << "); boundary searches used grid scans";
    solution.warnings.push_back(msg.str());
  }
  return solution;
}

}  // namespace dataplan
