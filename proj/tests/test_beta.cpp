#include <cmath>
#include <random>

#include <boost/math/special_functions/digamma.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ttaad/beta.hpp"
#include "ttaad/error.hpp"
#include "ttaad/quadrature.hpp"

using namespace ttaad;

TEST(BetaParams, Validation) {
  EXPECT_THROW(BetaParams(0.0, 1.0), InputError);
  EXPECT_THROW(BetaParams(1.0, -2.0), InputError);
  EXPECT_THROW(BetaParams(std::nan(""), 1.0), InputError);
  EXPECT_THROW(BetaParams(1.0, std::numeric_limits<double>::infinity()), InputError);
  const BetaParams p(2, 6);
  EXPECT_DOUBLE_EQ(p.mean(), 0.25);
  EXPECT_DOUBLE_EQ(p.variance(), 2.0 * 6.0 / (64.0 * 9.0));
}

TEST(BetaPdf, Examples) {
  for (double x : {0.0, 0.1, 0.5, 0.99, 1.0}) EXPECT_DOUBLE_EQ(beta_pdf(x, BetaParams(1, 1)), 1.0);
  EXPECT_NEAR(beta_pdf(0.5, BetaParams(2, 2)), 1.5, 1e-14);
  EXPECT_EQ(beta_pdf(0.0, BetaParams(2, 2)), 0.0);
  EXPECT_TRUE(std::isinf(beta_pdf(0.0, BetaParams(0.5, 2))));
  EXPECT_NEAR(beta_pdf(1.0, BetaParams(3, 1)), 3.0, 1e-14);
  EXPECT_EQ(beta_pdf(-0.1, BetaParams(2, 2)), 0.0);
  EXPECT_EQ(beta_pdf(1.1, BetaParams(2, 2)), 0.0);
}

TEST(BetaPdf, IntegratesToOne) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> par(0.5, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const BetaParams p(par(rng), par(rng));
    // The upper half is taken as Beta(b, a) on [0, 1/2], so both singular ends sit
    // at 0 where doubles are dense enough to resolve them.
    const BetaParams mirrored(p.beta(), p.alpha());
    const auto lower = integrate([&](double x) { return beta_pdf(x, p); }, 0.0, 0.5, {1e-11, 20000});
    const auto upper = integrate([&](double x) { return beta_pdf(x, mirrored); }, 0.0, 0.5, {1e-11, 20000});
    EXPECT_NEAR(lower.value + upper.value, 1.0, 1e-8) << p.describe();
  }
}

TEST(BetaPdf, MatchesSimpsonForSmoothShapes) {
  const BetaParams p(3.5, 2.25);
  const double s = oracle::simpson([&](double x) { return x * beta_pdf(x, p); }, 0.0, 1.0, 20000);
  EXPECT_NEAR(s, p.mean(), 1e-10);
}

TEST(Digamma, RecurrenceAndMonotonicity) {
  for (double z : {0.5, 1.0, 2.5, 7.0}) EXPECT_NEAR(digamma(z + 1) - digamma(z), 1.0 / z, 1e-10);
  double previous = -std::numeric_limits<double>::infinity();
  for (double z = 0.05; z < 60.0; z += 0.05) {
    const double v = digamma(z);
    EXPECT_GT(v, previous);
    previous = v;
  }
  EXPECT_THROW(digamma(0.0), InputError);
  EXPECT_THROW(digamma(-1.5), InputError);
}

TEST(Digamma, EulerGammaViaLogGammaDifference) {
  const double h = 1e-6;
  const double fd = (std::lgamma(1.0 + h) - std::lgamma(1.0 - h)) / (2 * h);
  EXPECT_NEAR(digamma(1.0), fd, 1e-8);
  EXPECT_NEAR(digamma(1.0), -0.5772156649, 1e-10);
}

TEST(Digamma, MatchesBoost) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logz(std::log(1e-3), std::log(1e4));
  for (int trial = 0; trial < 2000; ++trial) {
    const double z = std::exp(logz(rng));
    const double expected = boost::math::digamma(z);
    EXPECT_NEAR(digamma(z), expected, 1e-12 * std::max(1.0, std::abs(expected))) << z;
  }
}

TEST(BetaFit, ClosedFormMoments) {
  const BetaParams a = beta_from_moments(0.5, 0.05);
  EXPECT_NEAR(a.alpha(), 2.0, 1e-12);
  EXPECT_NEAR(a.beta(), 2.0, 1e-12);
  const BetaParams u = beta_from_moments(0.5, 1.0 / 12.0);
  EXPECT_NEAR(u.alpha(), 1.0, 1e-12);
  EXPECT_NEAR(u.beta(), 1.0, 1e-12);
  EXPECT_THROW(beta_from_moments(0.5, 0.25), InputError);
  EXPECT_THROW(beta_from_moments(1.0, 0.01), InputError);
  EXPECT_THROW(beta_from_moments(0.5, 0.0), InputError);
}

TEST(BetaFit, UsesUnbiasedVariance) {
  const std::vector<double> s{0.2, 0.4, 0.6};
  // mean 0.4, unbiased variance 0.04
  const BetaParams p = beta_fit(s);
  const double c = 0.4 * 0.6 / 0.04 - 1.0;
  EXPECT_NEAR(p.alpha(), 0.4 * c, 1e-12);
  EXPECT_NEAR(p.beta(), 0.6 * c, 1e-12);
  EXPECT_THROW(beta_fit(std::vector<double>{0.5}), InputError);
  EXPECT_THROW(beta_fit(std::vector<double>{0.5, 1.0}), InputError);
  EXPECT_THROW(beta_fit(std::vector<double>{0.5, 0.5}), InputError);
}

TEST(BetaSampler, RecoversParameters) {
  std::mt19937_64 rng(3);
  const BetaParams truth(3.0, 1.5);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = sample_beta(truth, rng);
  const BetaParams fit = beta_fit(draws);
  EXPECT_NEAR(fit.alpha(), 3.0, 0.1);
  EXPECT_NEAR(fit.beta(), 1.5, 0.1);
}

TEST(Quadrature, PolynomialExactAndErrors) {
  const auto r = integrate([](double x) { return x * x * x * x - 3 * x; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, (32.0 / 5 + 1.0 / 5) - 1.5 * (4 - 1), 1e-12);
  EXPECT_EQ(r.intervals, 1u);
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-10, 20000});
  EXPECT_NEAR(s.value, 2.0, 1e-8);
  EXPECT_THROW(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {1e-10, 50}), NumericalError);
  EXPECT_THROW(integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
}
