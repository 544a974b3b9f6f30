#pragma once

namespace dataplan {

/// A value known to lie in [0, 1].
class Probability {
 public:
  explicit Probability(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_;
};

/// Standard normal density phi(x).
double std_normal_pdf(double x);

/// Standard normal distribution function Phi(x).
Probability std_normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation for large x.
double std_normal_sf(double x);

/// Integral of x * phi(x) over [a, inf). Equals phi(a).
double upper_partial_expectation(double a);

/// Integral of (x - a) * phi(x) over [a, inf), i.e. phi(a) - a * (1 - Phi(a)).
///
/// This is the standardized expected shortfall of demand above a cap that
/// sits `a` standard deviations above the mean. Non-negative, strictly
/// decreasing, and its derivative is -(1 - Phi(a)).
double expected_excess(double a);

}  // namespace dataplan
