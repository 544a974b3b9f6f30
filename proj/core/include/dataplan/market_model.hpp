#pragma once

#include <functional>

namespace dataplan {

/// Demand side of the market: every consumer has the same mean demand `mu`
/// per unit period and values each unit of consumed data at `alpha`. The
/// plan caps consumption at `q` per unit period, pro-rated over the period.
class DemandProfile {
 public:
  /// Throws DomainError unless alpha > 0, mu > 0 and q >= mu.
  DemandProfile(double alpha, double mu, double q);

  double alpha() const noexcept { return alpha_; }
  double mu() const noexcept { return mu_; }
  double q() const noexcept { return q_; }
  double delta_q() const noexcept { return q_ - mu_; }

 private:
  double alpha_;
  double mu_;
  double q_;
};

/// Per-unit-period provider cost C(t) = W(t) + c0.
class CostModel {
 public:
  using TimeCost = std::function<double(double)>;

  /// Affine time cost W(t) = c1 * t.
  static CostModel affine(double c0, double c1);

  /// Arbitrary nondecreasing convex W. Monotonicity and convexity are spot
  /// checked by finite differences on (0, check_horizon]; throws DomainError
  /// on violation.
  static CostModel custom(double c0, TimeCost time_cost, double check_horizon = 100.0);

  double operator()(double t) const;

  double fixed_cost() const noexcept { return c0_; }
  /// Slope of the affine time cost, or NaN for a custom W.
  double unit_time_cost() const noexcept { return c1_; }
  bool is_affine() const noexcept { return !time_cost_; }

 private:
  CostModel(double c0, double c1, TimeCost time_cost);

  double c0_;
  double c1_;
  TimeCost time_cost_;
};

/// One menu entry: period length t (unit periods) and price per unit period.
struct ContractItem {
  double period;
  double price;
};

// Valuation of a type-sigma consumer for a period-t plan:
//   V = alpha * (mu - (sigma / sqrt(t)) * expected_excess(sqrt(t) * dq / sigma))
// with the sigma = 0 limit V = alpha * mu. All functions below throw
// DomainError for t <= 0, sigma < 0 or non-finite input.

double unsatisfied_demand(const DemandProfile& profile, double sigma, double t);
double valuation(const DemandProfile& profile, double sigma, double t);

/// dV/dt = alpha * sigma * phi(a) / (2 t^1.5); zero at sigma = 0.
double valuation_dt(const DemandProfile& profile, double sigma, double t);

/// A derivative value that may be a one-sided limit rather than a true
/// derivative (sigma = 0 sits on the edge of the type space).
struct Sensitivity {
  double value;
  bool one_sided_limit;
};

/// dV/dsigma = -alpha * phi(a) / sqrt(t). At sigma = 0 returns the limit 0,
/// flagged.
Sensitivity valuation_dsigma(const DemandProfile& profile, double sigma, double t);

/// d2V/(dsigma dt) = phi(a) * alpha / (2 sqrt(t)) * (1/t + dq^2/sigma^2).
/// Throws DomainError at sigma = 0.
double valuation_dsigma_dt(const DemandProfile& profile, double sigma, double t);

double item_profit(const ContractItem& item, const CostModel& cost);
double consumer_utility(const DemandProfile& profile, double sigma, const ContractItem& item);

/// Valuation minus provider cost: the welfare generated by serving one
/// type-sigma consumer on a period-t plan.
double social_surplus(const DemandProfile& profile, const CostModel& cost, double sigma, double t);

}  // namespace dataplan
