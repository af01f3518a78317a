#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "ttaad/error.hpp"
#include "ttaad/runs.hpp"

using namespace ttaad;

// --- counting ----------------------------------------------------------------

TEST(CountRuns, Examples) {
  EXPECT_EQ(count_runs(parse_bits("0011100011000")), 5u);
  EXPECT_EQ(count_runs(parse_bits("1111111")), 1u);
  EXPECT_EQ(count_runs(parse_bits("0000111")), 2u);
  EXPECT_EQ(count_runs(parse_bits("0101010101")), 10u);
  EXPECT_EQ(count_runs(parse_bits("1")), 1u);
  EXPECT_THROW(count_runs(BinarySequence{}), InputError);
  EXPECT_THROW(parse_bits("0120"), InputError);
}

TEST(CountRuns, MatchesSegmentScanner) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 2000; ++trial) {
    BinarySequence seq(1 + trial % 40);
    for (auto& b : seq) b = coin(rng) ? kInBit : kOutBit;
    const std::size_t runs = count_runs(seq);
    EXPECT_EQ(runs, oracle::segment_runs(seq));
    const bool both = std::count(seq.begin(), seq.end(), kInBit) > 0 && std::count(seq.begin(), seq.end(), kOutBit) > 0;
    if (both) {
      EXPECT_GE(runs, 2u);
      EXPECT_LE(runs, seq.size());
    }
  }
}

TEST(ScoresToSequence, Examples) {
  const auto in = Label::In;
  const auto out = Label::Out;
  EXPECT_EQ(scores_to_sequence({{0.1, in, ""}, {0.9, out, ""}}), (BinarySequence{kInBit, kOutBit}));
  const auto inter = scores_to_sequence({{0.1, in, ""}, {0.3, in, ""}, {0.2, out, ""}, {0.4, out, ""}});
  EXPECT_EQ(inter, (BinarySequence{1, 0, 1, 0}));
  EXPECT_EQ(count_runs(inter), 4u);
  const auto tied = scores_to_sequence({{0.5, out, ""}, {0.5, in, ""}, {0.5, out, ""}, {0.5, in, ""}});
  EXPECT_EQ(tied, (BinarySequence{1, 1, 0, 0}));
  EXPECT_EQ(count_runs(tied), 2u);
}

// --- densities -----------------------------------------------------------------

TEST(PdfOnUnit, ParseAndValidate) {
  EXPECT_EQ(PdfOnUnit::parse("uniform").beta_params(), BetaParams(1, 1));
  EXPECT_EQ(PdfOnUnit::parse("beta:2,3").beta_params(), BetaParams(2, 3));
  EXPECT_FALSE(PdfOnUnit::parse("uniform:0.2,0.6").beta_params().has_value());
  EXPECT_DOUBLE_EQ(PdfOnUnit::parse("uniform:0.2,0.6")(0.3), 2.5);
  EXPECT_THROW(PdfOnUnit::parse("gauss"), InputError);
  EXPECT_THROW(PdfOnUnit::parse("beta:-1,2"), InputError);
  EXPECT_THROW(PdfOnUnit::parse("uniform:0.6,0.2"), InputError);
  EXPECT_THROW(PdfOnUnit("half", [](double) { return 0.5; }, [](std::mt19937_64&) { return 0.5; }), InputError);
}

TEST(SampleSizes, Validation) {
  EXPECT_THROW(SampleSizes(0, 3), InputError);
  EXPECT_THROW(SampleSizes(3, -1), InputError);
  EXPECT_DOUBLE_EQ(SampleSizes(6, 3).kappa(), 2.0);
}

// --- Monte Carlo ---------------------------------------------------------------

TEST(ExpectedRunsMc, EnumerationOracle) {
  EXPECT_DOUBLE_EQ(enumerated_expected_runs(2, 2), 3.0);
  const auto u = PdfOnUnit::uniform();
  for (std::size_t n : {1u, 2u, 3u}) {
    const McEstimate mc = expected_runs_mc(u, u, SampleSizes(static_cast<long>(n), static_cast<long>(n)), 40000, 9);
    EXPECT_NEAR(mc.mean, enumerated_expected_runs(n, n), 3 * mc.std_error) << n;
  }
}

TEST(ExpectedRunsMc, DisjointSupportsGiveTwo) {
  const McEstimate mc =
      expected_runs_mc(PdfOnUnit::uniform_on(0.0, 0.5), PdfOnUnit::uniform_on(0.5, 1.0), SampleSizes(7, 4), 500, 1);
  EXPECT_EQ(mc.mean, 2.0);
  EXPECT_EQ(mc.std_error, 0.0);
}

TEST(ExpectedRunsMc, DeterministicAcrossThreadCounts) {
  const auto f = PdfOnUnit::beta(BetaParams(2, 5));
  const auto g = PdfOnUnit::beta(BetaParams(3, 1));
  const SampleSizes n(20, 30);
  const McEstimate a = expected_runs_mc(f, g, n, 3000, 42, 1);
  const McEstimate b = expected_runs_mc(f, g, n, 3000, 42, 1);
  const McEstimate c = expected_runs_mc(f, g, n, 3000, 42, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.std_error, c.std_error);
  EXPECT_NE(a.mean, expected_runs_mc(f, g, n, 3000, 43, 1).mean);
  EXPECT_THROW(expected_runs_mc(f, g, n, 0, 1), InputError);
}

// --- quadrature ------------------------------------------------------------------

TEST(ExpectedRunsQuadrature, UniformEqualSizes) {
  const auto u = PdfOnUnit::uniform();
  for (long n : {10L, 100L, 1000L}) EXPECT_NEAR(expected_runs_quadrature(u, u, SampleSizes(n, n)), n / 2.0, 1e-6);
}

TEST(ExpectedRunsQuadrature, DisjointSupportsGiveZero) {
  EXPECT_NEAR(expected_runs_quadrature(PdfOnUnit::uniform_on(0.0, 0.4), PdfOnUnit::uniform_on(0.6, 1.0),
                                       SampleSizes(50, 50)),
              0.0, 1e-12);
}

TEST(ExpectedRunsQuadrature, MatchesDenseSimpson) {
  const BetaParams b22(2, 2);
  const auto f = PdfOnUnit::beta(b22);
  const auto g = PdfOnUnit::uniform();
  const double n1 = 100, n2 = 100;
  const double simpson = oracle::simpson(
      [&](double x) {
        const double fx = 6.0 * x * (1.0 - x);  // Beta(2,2) written out independently
        const double denom = n1 * fx + n2;
        return n1 * n2 * fx / denom;
      },
      0.0, 1.0, 1000000);
  EXPECT_NEAR(expected_runs_quadrature(f, g, SampleSizes(100, 100)), simpson, 1e-6);
}

TEST(ExpectedRunsQuadrature, SymmetryAndScaling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> par(0.5, 8.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = PdfOnUnit::beta(BetaParams(par(rng), par(rng)));
    const auto g = PdfOnUnit::beta(BetaParams(par(rng), par(rng)));
    const double a = expected_runs_quadrature(f, g, SampleSizes(30, 70), 1e-10);
    EXPECT_NEAR(a, expected_runs_quadrature(g, f, SampleSizes(70, 30), 1e-10), 1e-8);
    EXPECT_NEAR(3.0 * a, expected_runs_quadrature(f, g, SampleSizes(90, 210), 1e-10), 1e-8);
  }
}

TEST(ExpectedRunsQuadrature, HandlesEndpointSingularities) {
  const auto f = PdfOnUnit::beta(BetaParams(0.5, 0.5));
  const auto g = PdfOnUnit::beta(BetaParams(0.7, 3.0));
  const double v = expected_runs_quadrature(f, g, SampleSizes(100, 100));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 50.0);
}

// --- derivative conditions -----------------------------------------------------------

TEST(Lemma3Condition, Examples) {
  EXPECT_EQ(lemma3_condition(BetaParams(3, 2), BetaParams(2, 2)), Lemma3Regime::Negative);
  EXPECT_DOUBLE_EQ(positive_regime_threshold(BetaParams(1, 1)), 1.5);
  EXPECT_EQ(lemma3_condition(BetaParams(1, 1), BetaParams(3, 1)), Lemma3Regime::Positive);
  EXPECT_EQ(lemma3_condition(BetaParams(1, 1), BetaParams(2, 1)), Lemma3Regime::Indeterminate);
  EXPECT_EQ(to_string(Lemma3Regime::Positive), "POSITIVE_REGIME");
}

TEST(ExpectedRunsDerivative, StationaryAtEqualDensities) {
  const SampleSizes n(100, 100);
  for (const BetaParams p : {BetaParams(2, 2), BetaParams(3, 5), BetaParams(1.5, 0.8)}) {
    const double er = expected_runs_beta(p, p, n);
    for (auto which : {BetaParameter::Alpha1, BetaParameter::Beta1, BetaParameter::Alpha2, BetaParameter::Beta2}) {
      EXPECT_LE(std::abs(expected_runs_derivative(p, p, n, which)), 1e-3 * er);
    }
  }
}

TEST(ExpectedRunsDerivative, SignsOnSharedBetaFamily) {
  // With beta1 = beta2 the regime conditions determine the sign of dER/dalpha1.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> par(0.5, 10.0);
  const SampleSizes n(100, 100);
  int negative = 0, positive = 0;
  while (negative < 8 || positive < 8) {
    const double b = par(rng);
    const BetaParams p1(par(rng), b);
    const BetaParams p2(par(rng), b);
    const Lemma3Regime regime = lemma3_condition(p1, p2);
    if (regime == Lemma3Regime::Indeterminate) continue;
    const double tol = 1e-6 * expected_runs_beta(p1, p2, n);
    const double d = expected_runs_derivative(p1, p2, n, BetaParameter::Alpha1);
    if (regime == Lemma3Regime::Negative && negative < 8) {
      EXPECT_LE(d, tol) << p1.describe() << " " << p2.describe();
      ++negative;
    } else if (regime == Lemma3Regime::Positive && positive < 8) {
      EXPECT_GE(d, -tol) << p1.describe() << " " << p2.describe();
      ++positive;
    }
  }
}

TEST(ExpectedRunsDerivative, RejectsStepLeavingDomain) {
  EXPECT_THROW(expected_runs_derivative(BetaParams(1e-5, 1), BetaParams(1, 1), SampleSizes(5, 5), BetaParameter::Alpha1),
               InputError);
  EXPECT_THROW(parse_beta_parameter("gamma1"), InputError);
  EXPECT_EQ(parse_beta_parameter("beta2"), BetaParameter::Beta2);
}

// --- maximality ---------------------------------------------------------------------

TEST(Maximality, ReferenceWins) {
  const BetaParams g(2, 2);
  const auto report =
      maximality_sweep(g, {BetaParams(2, 2), BetaParams(1, 1), BetaParams(5, 1), BetaParams(1, 5)}, SampleSizes(100, 100));
  EXPECT_TRUE(report.holds);
  ASSERT_TRUE(report.min_margin.has_value());
  EXPECT_GT(*report.min_margin, 0.0);
  EXPECT_NEAR(report.reference_runs, 50.0, 1e-6);

  const auto trivial = maximality_sweep(g, {g}, SampleSizes(100, 100));
  EXPECT_TRUE(trivial.holds);
  EXPECT_FALSE(trivial.min_margin.has_value());

  const auto far = maximality_sweep(BetaParams(1, 50), {BetaParams(50, 1)}, SampleSizes(100, 100));
  EXPECT_LT(far.rows[0].expected_runs, 1e-6 * far.reference_runs);
}

// --- report ---------------------------------------------------------------------------

TEST(SweepCsv, Schema) {
  testutil::TempDir dir;
  SweepRow full{BetaParams(2, 3), BetaParams(1, 1), 10, 20, 4.5, McEstimate{4.25, 0.5, 100}, Lemma3Regime::Negative};
  SweepRow sparse;
  sparse.n1 = 1;
  sparse.n2 = 2;
  write_sweep_csv({full, sparse}, dir / "s.csv");
  EXPECT_EQ(testutil::read_file(dir / "s.csv"),
            "alpha1,beta1,alpha2,beta2,n1,n2,er_quadrature,er_mc_mean,er_mc_stderr,regime\n"
            "2,3,1,1,10,20,4.5,4.25,0.5,NEGATIVE_REGIME\n"
            ",,,,1,2,,,,\n");
}
