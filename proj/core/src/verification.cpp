#include "dataplan/verification.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dataplan/error.hpp"
#include "dataplan/optimize.hpp"
#include "dataplan/parallel.hpp"

namespace dataplan {

FeasibilityCertificate brute_force_ic_ir(std::span<const ContractItem> items,
                                         std::span<const TypeAssignment> assignments, const DemandProfile& profile,
                                         double tol) {
  if (items.empty()) throw PreconditionError("brute_force_ic_ir: empty contract");
  FeasibilityCertificate cert;
  double worst_total = 0.0;
  for (const TypeAssignment& a : assignments) {
    if (a.item && *a.item >= items.size()) throw PreconditionError("brute_force_ic_ir: item index out of range");
    std::optional<std::size_t> best_item;
    double best_utility = 0.0;  // staying out
    double assigned_utility = 0.0;
    for (std::size_t j = 0; j < items.size(); ++j) {
      const double u = consumer_utility(profile, a.sigma, items[j]);
      if (a.item && j == *a.item) assigned_utility = u;
      if (u > best_utility || (!best_item && u == best_utility && a.item == j)) {
        best_utility = u;
        best_item = j;
      }
    }
    const double ic = best_utility - assigned_utility;
    const double ir = a.item ? -assigned_utility : 0.0;
    cert.worst_ic_violation = std::max(cert.worst_ic_violation, ic);
    cert.worst_ir_violation = std::max(cert.worst_ir_violation, ir);
    const double total = std::max(ic, ir);
    if (total > tol && total > worst_total) {
      worst_total = total;
      cert.violating_pair = ViolatingPair{a.sigma, best_item, a.item};
    }
    ++cert.types_checked;
  }
  cert.passed = cert.worst_ic_violation <= tol && cert.worst_ir_violation <= tol;
  return cert;
}

std::vector<TypeAssignment> assign_discrete(const DiscreteMarket& market) {
  std::vector<TypeAssignment> out;
  out.reserve(market.size());
  for (std::size_t i = 0; i < market.size(); ++i) out.push_back({market.type(i), i});
  return out;
}

std::vector<TypeAssignment> assign_grouped(const GroupedSolution& solution, std::span<const double> sigmas) {
  std::vector<TypeAssignment> out;
  out.reserve(sigmas.size());
  for (double s : sigmas) out.push_back({s, solution.group_of(s)});
  return out;
}

std::vector<double> sample_types(const ContinuousMarket& market, std::size_t count, std::uint64_t seed) {
  if (!market.bounded()) throw PreconditionError("sample_types: support must be bounded");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(market.sigma_min(), market.sigma_max());
  std::vector<double> out(count);
  for (double& s : out) s = dist(rng);
  return out;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw PreconditionError("make_grid: need step > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
  return grid;
}

GridOracleResult grid_oracle_discrete(const DiscreteMarket& market, const DemandProfile& profile,
                                      const CostModel& cost, std::span<const double> period_grid) {
  const std::size_t types = market.size();
  const std::size_t points = period_grid.size();
  if (types > 4 || points > 200 || points == 0) {
    std::ostringstream msg;
    msg << "grid_oracle_discrete: " << types << " types x " << points
        << " grid points exceeds the budget of 4 types x 200 points";
    throw BudgetError(msg.str());
  }
  if (!std::is_sorted(period_grid.begin(), period_grid.end())) {
    throw PreconditionError("grid_oracle_discrete: grid must be ascending");
  }

  // Profit of an ascending tuple splits into per-type terms; each is written
  // out here from valuations so the search does not share code with the
  // solver's objective.
  const auto term = [&](std::size_t i, double t) {
    const double below = market.count_below(i);
    const double v = valuation(profile, market.type(i), t);
    const double v_prev = i > 0 ? valuation(profile, market.type(i - 1), t) : 0.0;
    return (below + market.count(i)) * v - below * v_prev - market.count(i) * cost(t);
  };

  std::vector<std::vector<double>> best(types, std::vector<double>(points));
  std::vector<std::vector<std::size_t>> from(types, std::vector<std::size_t>(points, 0));
  std::size_t work = 0;
  for (std::size_t i = 0; i < types; ++i) {
    double running = -std::numeric_limits<double>::infinity();
    std::size_t running_arg = 0;
    for (std::size_t p = 0; p < points; ++p) {
      if (i > 0 && best[i - 1][p] > running) {
        running = best[i - 1][p];
        running_arg = p;
      }
      best[i][p] = term(i, period_grid[p]) + (i > 0 ? running : 0.0);
      from[i][p] = running_arg;
      ++work;
    }
  }
  std::size_t arg = static_cast<std::size_t>(
      std::max_element(best[types - 1].begin(), best[types - 1].end()) - best[types - 1].begin());
  GridOracleResult result;
  result.periods.resize(types);
  for (std::size_t i = types; i-- > 0;) {
    result.periods[i] = period_grid[arg];
    arg = from[i][arg];
  }
  const std::vector<double> prices = optimal_prices(result.periods, market, profile);
  result.profit = 0.0;
  for (std::size_t i = 0; i < types; ++i) result.profit += market.count(i) * (prices[i] - cost(result.periods[i]));
  result.work = work;
  return result;
}

GridOracleResult grid_oracle_grouped(const ContinuousMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, std::size_t groups,
                                     std::span<const double> boundary_grid, std::span<const double> period_grid,
                                     unsigned threads) {
  const std::size_t S = boundary_grid.size();
  const std::size_t P = period_grid.size();
  if (groups == 0 || S == 0 || P == 0) throw PreconditionError("grid_oracle_grouped: empty problem");
  const double work_estimate = static_cast<double>(groups - 1) * static_cast<double>(P) *
                                   static_cast<double>(P + 1) / 2.0 * static_cast<double>(S) +
                               static_cast<double>(P) * static_cast<double>(S);
  if (groups > 3 || work_estimate > 1e8) {
    std::ostringstream msg;
    msg << "grid_oracle_grouped: K = " << groups << " with " << S << " boundary x " << P
        << " period points needs " << work_estimate << " updates; budget is K <= 3 and 1e8 updates";
    throw BudgetError(msg.str());
  }
  if (!std::is_sorted(boundary_grid.begin(), boundary_grid.end()) ||
      !std::is_sorted(period_grid.begin(), period_grid.end())) {
    throw PreconditionError("grid_oracle_grouped: grids must be ascending");
  }

  // Tabulate everything once: served mass N G(sigma_s), V(sigma_s, t_p), C(t_p).
  std::vector<double> served(S);
  for (std::size_t s = 0; s < S; ++s) served[s] = market.total() * market.cdf(boundary_grid[s]);
  std::vector<double> costs(P);
  for (std::size_t p = 0; p < P; ++p) costs[p] = cost(period_grid[p]);
  std::vector<double> value(S * P);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t p = 0; p < P; ++p) value[s * P + p] = valuation(profile, boundary_grid[s], period_grid[p]);
  }
  const auto V = [&](std::size_t s, std::size_t p) { return value[s * P + p]; };

  // Profit telescopes into per-boundary terms
  //   served(s_k) * (V(s_k, p_k) - V(s_k, p_{k+1}) + C(p_{k+1}) - C(p_k))   for inner k
  //   served(s_K) * (V(s_K, p_K) - C(p_K))                                  for the top
  // so a DP over (period index, boundary upper bound) is exact.
  // reach[p][s]: best sum of inner terms so far with current period p and
  // every boundary chosen so far <= boundary_grid[s].
  const double kNegInf = -std::numeric_limits<double>::infinity();
  struct Back {
    std::size_t p;
    std::size_t s;
  };
  std::vector<std::vector<double>> reach(groups, std::vector<double>(P * S, kNegInf));
  std::vector<std::vector<Back>> back(groups, std::vector<Back>(P * S, Back{0, 0}));
  std::fill(reach[0].begin(), reach[0].end(), 0.0);

  for (std::size_t k = 0; k + 1 < groups; ++k) {
    const std::vector<double>& cur = reach[k];
    std::vector<double>& next = reach[k + 1];
    std::vector<Back>& next_back = back[k + 1];
    parallel_for(P, threads, [&](std::size_t q) {  // q: next period index
      std::vector<double> running(S);
      for (std::size_t p = 0; p <= q; ++p) {
        double best = kNegInf;
        std::size_t best_s = 0;
        const double dc = costs[q] - costs[p];
        for (std::size_t s = 0; s < S; ++s) {
          const double candidate = cur[p * S + s] + served[s] * (V(s, p) - V(s, q) + dc);
          if (candidate > best) {
            best = candidate;
            best_s = s;
          }
          if (best > next[q * S + s]) {
            next[q * S + s] = best;
            next_back[q * S + s] = {p, best_s};
          }
        }
      }
    });
  }

  double best = kNegInf;
  std::size_t best_p = 0;
  std::size_t best_s = 0;
  const std::vector<double>& last = reach[groups - 1];
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t s = 0; s < S; ++s) {
      const double total = last[p * S + s] + served[s] * (V(s, p) - costs[p]);
      if (total > best) {
        best = total;
        best_p = p;
        best_s = s;
      }
    }
  }

  GridOracleResult result;
  result.boundaries.resize(groups);
  result.periods.resize(groups);
  std::size_t p = best_p;
  std::size_t s = best_s;
  for (std::size_t k = groups; k-- > 0;) {
    result.boundaries[k] = boundary_grid[s];
    result.periods[k] = period_grid[p];
    if (k > 0) {
      const Back b = back[k][p * S + s];
      p = b.p;
      s = b.s;
    }
  }
  result.profit = grouped_profit(result.boundaries, result.periods, market, profile, cost);
  result.work = static_cast<std::size_t>(work_estimate);
  return result;
}

namespace {

// Union of windows of +-half_width points at spacing `step` around each
// center, clipped to [lo, hi] and deduplicated.
std::vector<double> window_grid(std::span<const double> centers, double step, int half_width, double lo, double hi) {
  std::vector<double> grid;
  for (double c : centers) {
    for (int j = -half_width; j <= half_width; ++j) {
      const double x = j == 0 ? c : c + step * j;
      if (x >= lo && x <= hi) grid.push_back(x);
    }
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double x : grid) {
    if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
  }
  return out;
}

}  // namespace

GridOracleResult refine_grid_oracle_grouped(const GridOracleResult& coarse, double coarse_step,
                                            const ContinuousMarket& market, const DemandProfile& profile,
                                            const CostModel& cost, int rounds, int factor, int window,
                                            unsigned threads) {
  if (rounds < 0 || factor < 2 || window < 1 || !(coarse_step > 0.0)) {
    throw PreconditionError("refine_grid_oracle_grouped: need rounds >= 0, factor >= 2, window >= 1, step > 0");
  }
  GridOracleResult best = coarse;
  double step = coarse_step;
  const double inf = std::numeric_limits<double>::infinity();
  for (int round = 0; round < rounds; ++round) {
    step /= factor;
    const int half_width = window * factor;
    const std::vector<double> sigmas =
        window_grid(best.boundaries, step, half_width, market.sigma_min(), market.sigma_max());
    const std::vector<double> periods = window_grid(best.periods, step, half_width, step / 2.0, inf);
    GridOracleResult next =
        grid_oracle_grouped(market, profile, cost, best.boundaries.size(), sigmas, periods, threads);
    next.work += best.work;
    if (next.profit >= best.profit) best = std::move(next);
  }
  return best;
}

MonteCarloEstimate monte_carlo_valuation(const DemandProfile& profile, double sigma, double t, std::size_t samples,
                                         std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("monte_carlo_valuation: need at least one sample");
  if (!(t > 0.0)) throw DomainError("monte_carlo_valuation: period must be positive");
  if (!(sigma >= 0.0)) throw DomainError("monte_carlo_valuation: sigma must be non-negative");
  std::mt19937_64 rng(seed);
  const boost::math::normal_distribution<double> standard;
  const double mean = t * profile.mu();
  const double sd = std::sqrt(t) * sigma;
  const double cap = t * profile.q();
  // Welford accumulation of the per-period shortfall.
  double avg = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double demand = mean + sd * boost::math::quantile(standard, u);
    const double shortfall = std::max(demand - cap, 0.0) / t;
    const double delta = shortfall - avg;
    avg += delta / static_cast<double>(i + 1);
    m2 += delta * (shortfall - avg);
  }
  const double variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {profile.alpha() * (profile.mu() - avg),
          profile.alpha() * std::sqrt(variance / static_cast<double>(samples)), samples};
}

const char* to_string(BaselinePolicy policy) {
  switch (policy) {
    case BaselinePolicy::kFullCoverage: return "full_coverage";
    case BaselinePolicy::kProfitMaximizing: return "profit_maximizing";
  }
  return "unknown";
}

BaselineResult fixed_period_baseline(const DiscreteMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, double period, BaselinePolicy policy) {
  if (!(period > 0.0)) throw DomainError("fixed_period_baseline: period must be positive");
  const double c = cost(period);
  const std::size_t n = market.size();
  std::size_t cutoff = n - 1;
  if (policy == BaselinePolicy::kProfitMaximizing) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double profit = market.count_below(j + 1) * (valuation(profile, market.type(j), period) - c);
      if (profit > best) {
        best = profit;
        cutoff = j;
      }
    }
  }
  const double price = valuation(profile, market.type(cutoff), period);
  const double served = market.count_below(cutoff + 1);
  return {policy, period, price, served * (price - c), market.type(cutoff), served / market.total()};
}

BaselineResult fixed_period_baseline(const ContinuousMarket& market, const DemandProfile& profile,
                                     const CostModel& cost, double period, BaselinePolicy policy) {
  if (!(period > 0.0)) throw DomainError("fixed_period_baseline: period must be positive");
  if (!market.bounded()) throw PreconditionError("fixed_period_baseline: support must be bounded");
  const double c = cost(period);
  double marginal = market.sigma_max();
  if (policy == BaselinePolicy::kProfitMaximizing) {
    marginal = maximize_by_scan(
                   [&](double sigma) { return market.cdf(sigma) * (valuation(profile, sigma, period) - c); },
                   market.sigma_min(), market.sigma_max(), 4000)
                   .arg;
  }
  const double price = valuation(profile, marginal, period);
  const double fraction = market.cdf(marginal);
  return {policy, period, price, market.total() * fraction * (price - c), marginal, fraction};
}

double uplift_percent(double optimal_profit, double baseline_profit) {
  return 100.0 * (optimal_profit / baseline_profit - 1.0);
}

namespace {

double best_surplus(const DemandProfile& profile, const CostModel& cost, double sigma, const PeriodDomain& domain,
                    double* argmax = nullptr) {
  const Argmax best = maximize_concave([&](double t) { return social_surplus(profile, cost, sigma, t); },
                                       domain.min_period, domain.max_period);
  if (argmax) *argmax = best.arg;
  return best.value;
}

}  // namespace

SocialMetrics social_metrics(const DiscreteSolution& solution, const DiscreteMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain) {
  if (solution.periods.size() != market.size()) throw PreconditionError("social_metrics: size mismatch");
  SocialMetrics m{0.0, 0.0, 0.0, std::vector<double>(market.size())};
  for (std::size_t i = 0; i < market.size(); ++i) {
    m.contract_surplus += market.count(i) * social_surplus(profile, cost, market.type(i), solution.periods[i]);
    m.max_surplus += market.count(i) * best_surplus(profile, cost, market.type(i), domain, &m.social_periods[i]);
  }
  m.ratio = m.contract_surplus / m.max_surplus;
  return m;
}

SocialMetrics social_metrics(const GroupedSolution& solution, const ContinuousMarket& market,
                             const DemandProfile& profile, const CostModel& cost, const PeriodDomain& domain) {
  using boost::math::quadrature::gauss_kronrod;
  const double n = market.total();
  SocialMetrics m{0.0, 0.0, 0.0, {}};
  double lower = market.sigma_min();
  for (std::size_t k = 0; k < solution.boundaries.size(); ++k) {
    const double upper = solution.boundaries[k];
    if (upper > lower) {
      const double t = solution.periods[k];
      m.contract_surplus +=
          n * gauss_kronrod<double, 31>::integrate(
                  [&](double s) { return market.pdf(s) * social_surplus(profile, cost, s, t); }, lower, upper, 8,
                  1e-12);
    }
    lower = std::max(lower, upper);
  }
  m.max_surplus = n * gauss_kronrod<double, 31>::integrate(
                          [&](double s) { return market.pdf(s) * std::max(0.0, best_surplus(profile, cost, s, domain)); },
                          market.sigma_min(), market.sigma_max(), 6, 1e-10);
  m.ratio = m.contract_surplus / m.max_surplus;
  return m;
}

}  // namespace dataplan
