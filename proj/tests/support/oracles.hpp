#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's special functions: densities are written out and integrals are
// done by Boost quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace oracle {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_cdf(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  if (x <= 0.0) return integrator.integrate(normal_pdf, -std::numeric_limits<double>::infinity(), x);
  return 1.0 - integrator.integrate(normal_pdf, x, std::numeric_limits<double>::infinity());
}

inline double partial_expectation(double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([](double x) { return x * normal_pdf(x); }, a,
                              std::numeric_limits<double>::infinity());
}

inline double expected_excess(double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([a](double x) { return (x - a) * normal_pdf(x); }, a,
                              std::numeric_limits<double>::infinity());
}

/// alpha * (mu - E[max(D - t q, 0)] / t) with D ~ Normal(t mu, sqrt(t) sigma),
/// integrated over the demand density directly.
inline double valuation(double alpha, double mu, double q, double sigma, double t) {
  if (sigma == 0.0) return alpha * mu;
  const double mean = t * mu;
  const double sd = std::sqrt(t) * sigma;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double excess = integrator.integrate(
      [&](double d) { return (d - t * q) * normal_pdf((d - mean) / sd) / sd; }, t * q,
      std::numeric_limits<double>::infinity());
  return alpha * (mu - excess / t);
}

/// alpha * E[max(D - t q, 0)] / t, the amount the valuation falls short of
/// alpha * mu. Differencing this directly avoids losing the small part
/// against alpha * mu.
inline double shortfall(double alpha, double mu, double q, double sigma, double t) {
  if (sigma == 0.0) return 0.0;
  return alpha * sigma / std::sqrt(t) * expected_excess(std::sqrt(t) * (q - mu) / sigma);
}

inline double integrate(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Best point of f on lo, lo + step, ..., hi.
struct ScanResult {
  double arg;
  double value;
};

inline ScanResult dense_scan(const std::function<double(double)>& f, double lo, double hi, double step) {
  ScanResult best{lo, -std::numeric_limits<double>::infinity()};
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) {
    const double x = lo + step * static_cast<double>(i);
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

/// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
