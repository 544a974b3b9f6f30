#include "dataplan/type_distributions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dataplan/error.hpp"
#include "oracles.hpp"

using namespace dataplan;

TEST(DiscreteMarketTest, Accessors) {
  const DiscreteMarket m({0.5, 1.0, 2.0}, {1.0, 2.0, 3.0});
  EXPECT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.count_below(0), 0.0);
  EXPECT_DOUBLE_EQ(m.count_below(2), 3.0);
  EXPECT_DOUBLE_EQ(m.count_below(3), 6.0);
  EXPECT_DOUBLE_EQ(m.total(), 6.0);
}

TEST(DiscreteMarketTest, Validation) {
  EXPECT_THROW(DiscreteMarket({1.0, 1.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(DiscreteMarket({2.0, 1.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(DiscreteMarket({-1.0, 1.0}, {1.0, 1.0}), DomainError);
  EXPECT_THROW(DiscreteMarket({1.0, 2.0}, {1.0, 0.0}), DomainError);
  EXPECT_THROW(DiscreteMarket({1.0, 2.0}, {1.0}), DomainError);
  EXPECT_THROW(DiscreteMarket({}, {}), DomainError);
}

namespace {

struct Case {
  std::string name;
  ContinuousMarket market;
};

std::vector<Case> markets() {
  return {
      {"uniform", ContinuousMarket(1.0, UniformDensity{0.0, 6.0})},
      {"uniform_shifted", ContinuousMarket(2.0, UniformDensity{1.0, 4.0})},
      {"exponential", ContinuousMarket(1.0, TruncatedExponentialDensity{0.5, 0.0, 6.0})},
      {"exponential_steep", ContinuousMarket(1.0, TruncatedExponentialDensity{2.0, 0.5, 5.0})},
      {"normal", ContinuousMarket(1.0, TruncatedNormalDensity{3.0, 1.5, 0.0, 6.0})},
      {"normal_off_center", ContinuousMarket(1.0, TruncatedNormalDensity{1.0, 1.0, 0.0, 6.0})},
  };
}

}  // namespace

TEST(ContinuousMarketTest, DistributionFunctionShape) {
  for (const Case& c : markets()) {
    const ContinuousMarket& m = c.market;
    EXPECT_NEAR(m.cdf(m.sigma_min()), 0.0, 1e-10) << c.name;
    EXPECT_NEAR(m.cdf(m.sigma_max()), 1.0, 1e-10) << c.name;
    double previous = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double s = m.sigma_min() + (m.sigma_max() - m.sigma_min()) * i / 1000.0;
      EXPECT_GE(m.pdf(s), 0.0);
      EXPECT_GE(m.cdf(s).value(), previous);
      previous = m.cdf(s);
    }
  }
}

TEST(ContinuousMarketTest, DensityIntegratesToOne) {
  for (const Case& c : markets()) {
    const ContinuousMarket& m = c.market;
    EXPECT_NEAR(oracle::integrate([&](double s) { return m.pdf(s); }, m.sigma_min(), m.sigma_max()), 1.0, 1e-8)
        << c.name;
    // and G is the running integral of g
    const double mid = 0.5 * (m.sigma_min() + m.sigma_max()) + 0.3;
    EXPECT_NEAR(oracle::integrate([&](double s) { return m.pdf(s); }, m.sigma_min(), mid), m.cdf(mid), 1e-10)
        << c.name;
  }
}

TEST(ContinuousMarketTest, DensitySlopeMatchesFiniteDifferences) {
  for (const Case& c : markets()) {
    const ContinuousMarket& m = c.market;
    for (int i = 1; i < 50; ++i) {
      const double s = m.sigma_min() + (m.sigma_max() - m.sigma_min()) * i / 50.0;
      const double fd = oracle::central_difference([&](double x) { return m.pdf(x); }, s, 1e-5);
      const double exact = m.pdf_dsigma(s);
      EXPECT_NEAR(fd, exact, 1e-6 * std::max(std::abs(exact), m.pdf(s))) << c.name << " s=" << s;
    }
  }
}

TEST(ContinuousMarketTest, QuantileInvertsDistribution) {
  for (const Case& c : markets()) {
    for (double p = 0.05; p < 1.0; p += 0.1) {
      EXPECT_NEAR(c.market.cdf(c.market.quantile(p)), p, 1e-10) << c.name;
    }
  }
}

TEST(ContinuousMarketTest, TruncatedExponentialReference) {
  // G(2) = (1 - e^-1) / (1 - e^-3)
  const ContinuousMarket m(1.0, TruncatedExponentialDensity{0.5, 0.0, 6.0});
  EXPECT_NEAR(m.cdf(2.0), 0.665240955774821889529018280175, 1e-14);
  EXPECT_NEAR(m.count_between(2.0, 6.0), 0.334759044225178110470981719825, 1e-14);
}

TEST(ContinuousMarketTest, TruncatedNormalMatchesParentRescaled) {
  const ContinuousMarket m(1.0, TruncatedNormalDensity{3.0, 1.5, 0.0, 6.0});
  const double lo = oracle::normal_cdf(-2.0);
  const double hi = oracle::normal_cdf(2.0);
  EXPECT_NEAR(m.cdf(4.0), (oracle::normal_cdf(2.0 / 3.0) - lo) / (hi - lo), 1e-12);
}

TEST(ContinuousMarketTest, SupportViolations) {
  const ContinuousMarket m(1.0, UniformDensity{0.0, 6.0});
  EXPECT_THROW(m.pdf(-0.1), DomainError);
  EXPECT_THROW(m.cdf(6.1), DomainError);
  EXPECT_THROW(ContinuousMarket(1.0, UniformDensity{3.0, 1.0}), DomainError);
  EXPECT_THROW(ContinuousMarket(0.0, UniformDensity{0.0, 1.0}), DomainError);
  EXPECT_THROW(ContinuousMarket(1.0, TruncatedExponentialDensity{-1.0, 0.0, 6.0}), DomainError);
  EXPECT_THROW(ContinuousMarket(1.0, TruncatedNormalDensity{3.0, 0.0, 0.0, 6.0}), DomainError);
}

TEST(BoundaryRegularity, UntruncatedExponentialAtOrigin) {
  for (double rate : {0.25, 0.5, 1.0, 3.0}) {
    const ContinuousMarket m(1.0, TruncatedExponentialDensity{rate, 0.0});
    EXPECT_NEAR(boundary_regularity_slack(m, 0.0), 2.0 * rate, 1e-12);
  }
}

TEST(BoundaryRegularity, UniformNonNegative) {
  const ContinuousMarket m(1.0, UniformDensity{0.0, 6.0});
  for (double s = 0.0; s <= 6.0; s += 0.01) EXPECT_GE(boundary_regularity_slack(m, s), 0.0) << s;
}

TEST(BoundaryRegularity, TruncatedNormalGrid) {
  const ContinuousMarket m(1.0, TruncatedNormalDensity{3.0, 1.5, 0.0, 6.0});
  for (int i = 1; i <= 59; ++i) EXPECT_GE(boundary_regularity_slack(m, 0.1 * i), 0.0) << 0.1 * i;
}

TEST(BoundaryRegularity, OutsideSupportThrows) {
  const ContinuousMarket m(1.0, UniformDensity{0.0, 6.0});
  EXPECT_THROW(boundary_regularity_slack(m, 7.0), DomainError);
}

TEST(BoundaryRegularity, Reports) {
  EXPECT_TRUE(verify_boundary_regularity(ContinuousMarket(1.0, UniformDensity{0.0, 6.0}), 1000).holds);
  EXPECT_TRUE(
      verify_boundary_regularity(ContinuousMarket(1.0, TruncatedExponentialDensity{0.5, 0.0, 6.0}), 1000).holds);
  const RegularityReport r =
      verify_boundary_regularity(ContinuousMarket(1.0, TruncatedNormalDensity{3.0, 1.0, 0.0, 6.0}), 1000);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.grid_points, 1000u);
  EXPECT_GE(r.min_slack, -1e-10);
  EXPECT_THROW(verify_boundary_regularity(ContinuousMarket(1.0, UniformDensity{0.0, 6.0}), 1), PreconditionError);
}

TEST(BoundaryRegularity, SlackMatchesIndependentEvaluation) {
  // Truncated normal (3, 1.5) on [0, 6] with g, g' and G rebuilt from the
  // parent density.
  const ContinuousMarket m(1.0, TruncatedNormalDensity{3.0, 1.5, 0.0, 6.0});
  const double mass = oracle::normal_cdf(2.0) - oracle::normal_cdf(-2.0);
  for (double s : {0.3, 1.0, 2.5, 4.0, 5.7}) {
    const double z = (s - 3.0) / 1.5;
    const double g = oracle::normal_pdf(z) / (1.5 * mass);
    const double dg = -z / 1.5 * g;
    const double G = (oracle::normal_cdf(z) - oracle::normal_cdf(-2.0)) / mass;
    const double expected = (2.0 * g * g - dg * G) / g - (3.0 - 2.0 * std::sqrt(2.0)) / s * G;
    EXPECT_NEAR(boundary_regularity_slack(m, s), expected, 1e-12) << s;
  }
}

// The regularity condition relies on two elementary inequalities.
TEST(SupportingInequalities, RatioBound) {
  oracle::Gen gen(21);
  const double bound = 3.0 - 2.0 * std::sqrt(2.0);
  for (int i = 0; i < 20000; ++i) {
    const double sigma = gen.log_uniform(1e-2, 1e2);
    const double x = gen.log_uniform(1e-4, 1e4) * sigma * sigma;  // x = t * dq^2
    const double lhs = x * (sigma * sigma - x) / (sigma * sigma * sigma * (sigma * sigma + x));
    EXPECT_LE(lhs, bound / sigma * (1.0 + 1e-12));
  }
  // equality at x = (sqrt 2 - 1) sigma^2
  const double sigma = 1.7;
  const double x = (std::sqrt(2.0) - 1.0) * sigma * sigma;
  EXPECT_NEAR(x * (sigma * sigma - x) / (sigma * sigma * sigma * (sigma * sigma + x)), bound / sigma, 1e-14);
}

TEST(SupportingInequalities, ExponentialRatioAtLeastOne) {
  oracle::Gen gen(22);
  for (int i = 0; i < 20000; ++i) {
    const double x = gen.log_uniform(1e-8, 50.0);
    EXPECT_GE(x / -std::expm1(-x), 1.0);
  }
}
