#pragma once

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

#include "dataplan/special_functions.hpp"

namespace dataplan {

/// Finite population of consumer types sigma_1 < ... < sigma_I with N_i
/// consumers of each type.
class DiscreteMarket {
 public:
  /// Throws DomainError unless types are strictly ascending and
  /// non-negative, counts are positive, and the lengths match.
  DiscreteMarket(std::vector<double> types, std::vector<double> counts);

  std::size_t size() const noexcept { return types_.size(); }
  const std::vector<double>& types() const noexcept { return types_; }
  const std::vector<double>& counts() const noexcept { return counts_; }
  double type(std::size_t i) const { return types_.at(i); }
  double count(std::size_t i) const { return counts_.at(i); }
  /// Number of consumers with index < i.
  double count_below(std::size_t i) const;
  double total() const;

 private:
  std::vector<double> types_;
  std::vector<double> counts_;
};

struct UniformDensity {
  double sigma_min;
  double sigma_max;
};

/// Exponential density with rate lambda, shifted to start at sigma_min and
/// renormalized on [sigma_min, sigma_max]. sigma_max may be +infinity.
struct TruncatedExponentialDensity {
  double rate;
  double sigma_min;
  double sigma_max = std::numeric_limits<double>::infinity();
};

/// Normal(mean, std_dev) restricted to [lower, upper].
struct TruncatedNormalDensity {
  double mean;
  double std_dev;
  double lower;
  double upper;
};

using TypeDensity = std::variant<UniformDensity, TruncatedExponentialDensity, TruncatedNormalDensity>;

/// Continuum of `total_n` consumers whose types follow `density`.
class ContinuousMarket {
 public:
  ContinuousMarket(double total_n, TypeDensity density);

  double total() const noexcept { return total_n_; }
  const TypeDensity& density() const noexcept { return density_; }
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }
  bool bounded() const noexcept;

  /// g, G and dg/dsigma. Throw DomainError outside [sigma_min, sigma_max].
  double pdf(double sigma) const;
  Probability cdf(double sigma) const;
  double pdf_dsigma(double sigma) const;

  /// Smallest sigma with G(sigma) >= p, by bisection.
  double quantile(double p) const;

  /// N * (G(hi) - G(lo)).
  double count_between(double lo, double hi) const;

 private:
  void check_support(double sigma, const char* what) const;

  double total_n_;
  TypeDensity density_;
  double sigma_min_;
  double sigma_max_;
  double mass_;  // truncation normalizer
};

/// Slack of the regularity condition that makes every boundary objective
/// unimodal:
///   (2 g^2 - g' G) / g - (3 - 2 sqrt 2) / sigma * G    for sigma > 0
///   (2 g^2 - g' G) / g                                  for sigma = 0
/// The condition holds at sigma iff the slack is >= 0.
double boundary_regularity_slack(const ContinuousMarket& market, double sigma);

struct RegularityReport {
  bool holds;
  double min_slack;
  double argmin_sigma;
  std::size_t grid_points;
};

/// Evaluates the slack on an equispaced grid over the support (the upper
/// end of an unbounded support is replaced by the 1 - 1e-12 quantile).
/// Holds iff every slack is >= -1e-10. Throws PreconditionError when
/// grid_points < 2.
RegularityReport verify_boundary_regularity(const ContinuousMarket& market, std::size_t grid_points);

}  // namespace dataplan
