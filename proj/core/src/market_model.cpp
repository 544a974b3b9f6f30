#include "dataplan/market_model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dataplan/error.hpp"
#include "dataplan/special_functions.hpp"

namespace dataplan {
namespace {

void check_args(double sigma, double t, const char* what) {
  if (!std::isfinite(t) || t <= 0.0) {
    throw DomainError(std::string(what) + ": period must be positive and finite");
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw DomainError(std::string(what) + ": consumer type must be non-negative and finite");
  }
}

// Standardized distance of the pro-rated cap above mean demand.
double cap_margin(const DemandProfile& profile, double sigma, double t) {
  return std::sqrt(t) * profile.delta_q() / sigma;
}

}  // namespace

DemandProfile::DemandProfile(double alpha, double mu, double q) : alpha_(alpha), mu_(mu), q_(q) {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("DemandProfile: alpha must be > 0");
  if (!std::isfinite(mu) || mu <= 0.0) throw DomainError("DemandProfile: mu must be > 0");
  if (!std::isfinite(q) || q < mu) throw DomainError("DemandProfile: q must be >= mu");
}

CostModel::CostModel(double c0, double c1, TimeCost time_cost)
    : c0_(c0), c1_(c1), time_cost_(std::move(time_cost)) {}

CostModel CostModel::affine(double c0, double c1) {
  if (!std::isfinite(c0) || c0 < 0.0) throw DomainError("CostModel: c0 must be >= 0");
  if (!std::isfinite(c1) || c1 < 0.0) throw DomainError("CostModel: c1 must be >= 0");
  return CostModel(c0, c1, nullptr);
}

CostModel CostModel::custom(double c0, TimeCost time_cost, double check_horizon) {
  if (!std::isfinite(c0) || c0 < 0.0) throw DomainError("CostModel: c0 must be >= 0");
  if (!time_cost) throw DomainError("CostModel: time cost function is empty");
  constexpr int kChecks = 200;
  const double h = check_horizon / kChecks;
  for (int i = 1; i < kChecks; ++i) {
    const double t = i * h;
    const double lo = time_cost(t - 0.5 * h);
    const double mid = time_cost(t);
    const double hi = time_cost(t + 0.5 * h);
    const double scale = 1e-10 * (1.0 + std::abs(mid));
    if (hi < mid - scale || mid < lo - scale) {
      throw DomainError("CostModel: time cost is decreasing near t = " + std::to_string(t));
    }
    if (lo + hi - 2.0 * mid < -scale) {
      throw DomainError("CostModel: time cost is not convex near t = " + std::to_string(t));
    }
  }
  return CostModel(c0, std::numeric_limits<double>::quiet_NaN(), std::move(time_cost));
}

double CostModel::operator()(double t) const {
  if (!std::isfinite(t) || t <= 0.0) throw DomainError("cost: period must be positive and finite");
  return c0_ + (time_cost_ ? time_cost_(t) : c1_ * t);
}

double unsatisfied_demand(const DemandProfile& profile, double sigma, double t) {
  check_args(sigma, t, "unsatisfied_demand");
  if (sigma == 0.0) return 0.0;
  return sigma / std::sqrt(t) * expected_excess(cap_margin(profile, sigma, t));
}

double valuation(const DemandProfile& profile, double sigma, double t) {
  return profile.alpha() * (profile.mu() - unsatisfied_demand(profile, sigma, t));
}

double valuation_dt(const DemandProfile& profile, double sigma, double t) {
  check_args(sigma, t, "valuation_dt");
  if (sigma == 0.0) return 0.0;
  return profile.alpha() * sigma * std_normal_pdf(cap_margin(profile, sigma, t)) /
         (2.0 * t * std::sqrt(t));
}

Sensitivity valuation_dsigma(const DemandProfile& profile, double sigma, double t) {
  check_args(sigma, t, "valuation_dsigma");
  if (sigma == 0.0) return {0.0, true};
  return {-profile.alpha() * std_normal_pdf(cap_margin(profile, sigma, t)) / std::sqrt(t), false};
}

double valuation_dsigma_dt(const DemandProfile& profile, double sigma, double t) {
  check_args(sigma, t, "valuation_dsigma_dt");
  if (sigma == 0.0) throw DomainError("valuation_dsigma_dt: undefined at sigma = 0");
  const double dq = profile.delta_q();
  return std_normal_pdf(cap_margin(profile, sigma, t)) * profile.alpha() / (2.0 * std::sqrt(t)) *
         (1.0 / t + dq * dq / (sigma * sigma));
}

double item_profit(const ContractItem& item, const CostModel& cost) {
  return item.price - cost(item.period);
}

double consumer_utility(const DemandProfile& profile, double sigma, const ContractItem& item) {
  return valuation(profile, sigma, item.period) - item.price;
}

double social_surplus(const DemandProfile& profile, const CostModel& cost, double sigma, double t) {
  return valuation(profile, sigma, t) - cost(t);
}

}  // namespace dataplan
