#include "dataplan/special_functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dataplan/error.hpp"
#include "oracles.hpp"

using namespace dataplan;

namespace {
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
}

TEST(StdNormalPdf, ValueAtZero) { EXPECT_NEAR(std_normal_pdf(0.0), kInvSqrt2Pi, 1e-16); }

TEST(StdNormalPdf, ValueAtOne) {
  // mpmath npdf(1) to 30 digits
  EXPECT_NEAR(std_normal_pdf(1.0), 0.241970724519143349797830192936, 1e-16);
}

TEST(StdNormalPdf, EvenAndPositive) {
  for (double x = -12.0; x <= 12.0; x += 0.37) {
    EXPECT_EQ(std_normal_pdf(x), std_normal_pdf(-x));
    EXPECT_GT(std_normal_pdf(x), 0.0);
  }
}

TEST(StdNormalPdf, RejectsNonFinite) {
  EXPECT_THROW(std_normal_pdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(std_normal_pdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(StdNormalCdf, Center) { EXPECT_DOUBLE_EQ(std_normal_cdf(0.0).value(), 0.5); }

TEST(StdNormalCdf, MatchesQuadratureAt196) {
  const double reference = oracle::normal_cdf(1.96);
  EXPECT_NEAR(reference, 0.975002104851779563787176307604, 1e-14);
  EXPECT_NEAR(std_normal_cdf(1.96), reference, 1e-12);
}

TEST(StdNormalCdf, UpperTail) { EXPECT_NEAR(std_normal_cdf(40.0), 1.0, 1e-15); }

TEST(StdNormalCdf, AccurateAgainstQuadratureOnGrid) {
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    EXPECT_NEAR(std_normal_cdf(x), oracle::normal_cdf(x), 1e-12) << "x=" << x;
  }
}

TEST(StdNormalCdf, ReflectionAndMonotone) {
  double previous = 0.0;
  for (double x = -10.0; x <= 10.0; x += 0.01) {
    EXPECT_NEAR(std_normal_cdf(-x) + std_normal_cdf(x), 1.0, 1e-14);
    EXPECT_GE(std_normal_cdf(x).value(), previous);
    previous = std_normal_cdf(x);
  }
}

TEST(StdNormalCdf, RejectsNonFinite) {
  EXPECT_THROW(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(StdNormalSf, ComplementsCdfWithoutCancellation) {
  EXPECT_NEAR(std_normal_sf(1.0), 1.0 - std_normal_cdf(1.0), 1e-15);
  // tail far beyond where 1 - Phi underflows to zero
  EXPECT_GT(std_normal_sf(10.0), 0.0);
  EXPECT_NEAR(std_normal_sf(10.0) / 7.61985302416047e-24, 1.0, 1e-12);
}

TEST(ProbabilityType, RejectsOutOfRange) {
  EXPECT_THROW(Probability(1.5), DomainError);
  EXPECT_THROW(Probability(-0.1), DomainError);
  EXPECT_THROW(Probability(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_DOUBLE_EQ(Probability(0.25), 0.25);
}

TEST(UpperPartialExpectation, Values) {
  EXPECT_NEAR(upper_partial_expectation(0.0), kInvSqrt2Pi, 1e-16);
  EXPECT_LT(upper_partial_expectation(40.0), 1e-300);
  EXPECT_NEAR(upper_partial_expectation(1.0), oracle::partial_expectation(1.0), 1e-14);
}

TEST(UpperPartialExpectation, EqualsDensity) {
  for (double a = -9.0; a <= 9.0; a += 0.25) EXPECT_EQ(upper_partial_expectation(a), std_normal_pdf(a));
}

TEST(ExpectedExcess, Values) {
  EXPECT_NEAR(expected_excess(0.0), kInvSqrt2Pi, 1e-16);
  EXPECT_NEAR(expected_excess(0.5), oracle::expected_excess(0.5), 1e-14);
  EXPECT_NEAR(expected_excess(0.5), 0.197796557401306029593532746901, 1e-15);
  EXPECT_LT(expected_excess(10.0), 1e-20);
  EXPECT_GE(expected_excess(10.0), 0.0);
}

TEST(ExpectedExcess, NonNegativeAndDecreasing) {
  double previous = std::numeric_limits<double>::infinity();
  for (double a = -8.0; a <= 8.0; a += 1e-3) {
    const double e = expected_excess(a);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, previous) << "a=" << a;
    previous = e;
  }
}

TEST(ExpectedExcess, DerivativeIsMinusUpperTail) {
  for (double a = -5.0; a <= 5.0; a += 0.25) {
    const double fd = oracle::central_difference([](double x) { return expected_excess(x); }, a, 1e-6);
    const double exact = -(1.0 - oracle::normal_cdf(a));
    EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact)) << "a=" << a;
  }
}

TEST(ExpectedExcess, AgreesWithQuadratureOnGrid) {
  for (double a = -6.0; a <= 6.0; a += 0.5) {
    EXPECT_NEAR(expected_excess(a), oracle::expected_excess(a), 1e-13 * (1.0 + std::abs(a))) << "a=" << a;
  }
}
