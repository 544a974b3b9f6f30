#include "dataplan/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dataplan/error.hpp"

namespace dataplan {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("Probability: value " + std::to_string(value) + " outside [0, 1]");
  }
}

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

// erfc keeps full relative precision in both tails, so Phi is evaluated from
// whichever side avoids subtracting from one.
Probability std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return Probability(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double std_normal_sf(double x) {
  require_finite(x, "std_normal_sf");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double upper_partial_expectation(double a) { return std_normal_pdf(a); }

double expected_excess(double a) {
  require_finite(a, "expected_excess");
  const double value = std_normal_pdf(a) - a * std_normal_sf(a);
  // Cancellation in the far right tail can leave a tiny negative residue.
  return value > 0.0 ? value : 0.0;
}

}  // namespace dataplan
