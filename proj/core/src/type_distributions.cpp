#include "dataplan/type_distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dataplan/error.hpp"

namespace dataplan {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kRegularityTolerance = 1e-10;

}  // namespace

DiscreteMarket::DiscreteMarket(std::vector<double> types, std::vector<double> counts)
    : types_(std::move(types)), counts_(std::move(counts)) {
  if (types_.empty()) throw DomainError("DiscreteMarket: no consumer types");
  if (types_.size() != counts_.size()) {
    throw DomainError("DiscreteMarket: types and counts differ in length");
  }
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (!std::isfinite(types_[i]) || types_[i] < 0.0) {
      throw DomainError("DiscreteMarket: type " + std::to_string(i) + " must be >= 0");
    }
    if (i > 0 && !(types_[i] > types_[i - 1])) {
      throw DomainError("DiscreteMarket: types must be strictly ascending");
    }
    if (!std::isfinite(counts_[i]) || counts_[i] <= 0.0) {
      throw DomainError("DiscreteMarket: count " + std::to_string(i) + " must be > 0");
    }
  }
}

double DiscreteMarket::count_below(std::size_t i) const {
  if (i > counts_.size()) throw PreconditionError("DiscreteMarket::count_below: index out of range");
  return std::accumulate(counts_.begin(), counts_.begin() + static_cast<std::ptrdiff_t>(i), 0.0);
}

double DiscreteMarket::total() const { return count_below(counts_.size()); }

ContinuousMarket::ContinuousMarket(double total_n, TypeDensity density)
    : total_n_(total_n), density_(density), mass_(1.0) {
  if (!std::isfinite(total_n) || total_n <= 0.0) {
    throw DomainError("ContinuousMarket: total consumers must be > 0");
  }
  std::visit(overloaded{
                 [&](const UniformDensity& d) {
                   sigma_min_ = d.sigma_min;
                   sigma_max_ = d.sigma_max;
                   if (!std::isfinite(d.sigma_max)) {
                     throw DomainError("uniform density: sigma_max must be finite");
                   }
                 },
                 [&](const TruncatedExponentialDensity& d) {
                   sigma_min_ = d.sigma_min;
                   sigma_max_ = d.sigma_max;
                   if (!std::isfinite(d.rate) || d.rate <= 0.0) {
                     throw DomainError("exponential density: rate must be > 0");
                   }
                   mass_ = -std::expm1(-d.rate * (d.sigma_max - d.sigma_min));
                 },
                 [&](const TruncatedNormalDensity& d) {
                   sigma_min_ = d.lower;
                   sigma_max_ = d.upper;
                   if (!std::isfinite(d.mean) || !std::isfinite(d.std_dev) || d.std_dev <= 0.0) {
                     throw DomainError("truncated normal density: std_dev must be > 0");
                   }
                   if (!std::isfinite(d.upper)) {
                     throw DomainError("truncated normal density: upper must be finite");
                   }
                   mass_ = std_normal_cdf((d.upper - d.mean) / d.std_dev) -
                           std_normal_cdf((d.lower - d.mean) / d.std_dev);
                   if (!(mass_ > 0.0)) throw DomainError("truncated normal density: no mass on support");
                 },
             },
             density_);
  if (!std::isfinite(sigma_min_) || sigma_min_ < 0.0) {
    throw DomainError("ContinuousMarket: sigma_min must be >= 0");
  }
  if (!(sigma_max_ > sigma_min_)) throw DomainError("ContinuousMarket: sigma_max must exceed sigma_min");
}

bool ContinuousMarket::bounded() const noexcept { return std::isfinite(sigma_max_); }

void ContinuousMarket::check_support(double sigma, const char* what) const {
  if (!(sigma >= sigma_min_ && sigma <= sigma_max_)) {
    throw DomainError(std::string(what) + ": sigma = " + std::to_string(sigma) + " outside the support");
  }
}

double ContinuousMarket::pdf(double sigma) const {
  check_support(sigma, "pdf");
  return std::visit(overloaded{
                        [](const UniformDensity& d) { return 1.0 / (d.sigma_max - d.sigma_min); },
                        [&](const TruncatedExponentialDensity& d) {
                          return d.rate * std::exp(-d.rate * (sigma - d.sigma_min)) / mass_;
                        },
                        [&](const TruncatedNormalDensity& d) {
                          return std_normal_pdf((sigma - d.mean) / d.std_dev) / (d.std_dev * mass_);
                        },
                    },
                    density_);
}

Probability ContinuousMarket::cdf(double sigma) const {
  check_support(sigma, "cdf");
  const double value = std::visit(
      overloaded{
          [&](const UniformDensity& d) { return (sigma - d.sigma_min) / (d.sigma_max - d.sigma_min); },
          [&](const TruncatedExponentialDensity& d) {
            return -std::expm1(-d.rate * (sigma - d.sigma_min)) / mass_;
          },
          [&](const TruncatedNormalDensity& d) {
            return (std_normal_cdf((sigma - d.mean) / d.std_dev) -
                    std_normal_cdf((d.lower - d.mean) / d.std_dev)) /
                   mass_;
          },
      },
      density_);
  return Probability(std::clamp(value, 0.0, 1.0));
}

double ContinuousMarket::pdf_dsigma(double sigma) const {
  check_support(sigma, "pdf_dsigma");
  return std::visit(overloaded{
                        [](const UniformDensity&) { return 0.0; },
                        [&](const TruncatedExponentialDensity& d) { return -d.rate * pdf(sigma); },
                        [&](const TruncatedNormalDensity& d) {
                          return -(sigma - d.mean) / (d.std_dev * d.std_dev) * pdf(sigma);
                        },
                    },
                    density_);
}

double ContinuousMarket::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: probability outside [0, 1]");
  if (p <= 0.0) return sigma_min_;
  if (const auto* e = std::get_if<TruncatedExponentialDensity>(&density_)) {
    // Closed form; also covers the unbounded support.
    if (p >= 1.0) return sigma_max_;
    return e->sigma_min - std::log1p(-p * mass_) / e->rate;
  }
  if (p >= 1.0) return sigma_max_;
  double lo = sigma_min_;
  double hi = sigma_max_;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double ContinuousMarket::count_between(double lo, double hi) const {
  if (!(lo <= hi)) throw DomainError("count_between: bounds out of order");
  return total_n_ * (cdf(hi) - cdf(lo));
}

double boundary_regularity_slack(const ContinuousMarket& market, double sigma) {
  const double g = market.pdf(sigma);
  if (!(g > 0.0)) throw DomainError("boundary_regularity_slack: density vanishes");
  const double G = market.cdf(sigma);
  const double lhs = (2.0 * g * g - market.pdf_dsigma(sigma) * G) / g;
  if (sigma == 0.0) return lhs;
  return lhs - (3.0 - 2.0 * std::sqrt(2.0)) / sigma * G;
}

RegularityReport verify_boundary_regularity(const ContinuousMarket& market, std::size_t grid_points) {
  if (grid_points < 2) throw PreconditionError("verify_boundary_regularity: need at least 2 points");
  const double lo = market.sigma_min();
  const double hi = market.bounded() ? market.sigma_max() : market.quantile(1.0 - 1e-12);
  RegularityReport report{true, std::numeric_limits<double>::infinity(), lo, grid_points};
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double sigma =
        (i + 1 == grid_points) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double slack = boundary_regularity_slack(market, sigma);
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.argmin_sigma = sigma;
    }
  }
  report.holds = report.min_slack >= -kRegularityTolerance;
  return report;
}

}  // namespace dataplan
