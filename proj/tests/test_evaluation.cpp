#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "json.hpp"
#include "oracles.hpp"
#include "test_util.hpp"
#include "ttaad/error.hpp"
#include "ttaad/evaluation.hpp"

using namespace ttaad;

namespace {

std::vector<ScoreRecord> make(std::initializer_list<double> in, std::initializer_list<double> out) {
  std::vector<ScoreRecord> r;
  for (double s : in) r.push_back({s, Label::In, ""});
  for (double s : out) r.push_back({s, Label::Out, ""});
  return r;
}

// Scores drawn from a small grid so that ties are frequent.
std::vector<ScoreRecord> random_records(std::mt19937_64& rng, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> size(2, max_size);
  std::uniform_int_distribution<int> grid(0, 12);
  std::bernoulli_distribution coin(0.5);
  std::vector<ScoreRecord> r(size(rng));
  for (auto& rec : r) {
    rec.score = grid(rng) / 12.0;
    rec.label = coin(rng) ? Label::Out : Label::In;
  }
  r[0].label = Label::In;
  r[1].label = Label::Out;
  return r;
}

}  // namespace

TEST(Auroc, Examples) {
  EXPECT_EQ(auroc(make({0.1, 0.2}, {0.8, 0.9})), 1.0);
  EXPECT_EQ(auroc(make({0.1, 0.3}, {0.2, 0.4})), 0.75);
  EXPECT_EQ(auroc(make({0.5, 0.5, 0.5}, {0.5, 0.5})), 0.5);
}

TEST(Auroc, SingleClassIsUndefined) {
  EXPECT_THROW(auroc(make({0.1, 0.2}, {})), UndefinedMetricError);
  EXPECT_THROW(auroc(make({}, {0.1})), UndefinedMetricError);
  EXPECT_THROW(auroc({}), UndefinedMetricError);
}

TEST(Auroc, MatchesBruteForcePairs) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const auto r = random_records(rng, 50);
    EXPECT_NEAR(auroc(r), oracle::brute_force_auroc(r), 1e-12);
  }
}

TEST(Auroc, InvarianceProperties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = random_records(rng, 40);
    const double a = auroc(r);

    auto warped = r;
    for (auto& rec : warped) rec.score = std::exp(3.0 * rec.score) - 7.0;
    EXPECT_EQ(auroc(warped), a);

    auto flipped = r;
    for (auto& rec : flipped) {
      rec.label = rec.label == Label::In ? Label::Out : Label::In;
      rec.score = -rec.score;
    }
    EXPECT_NEAR(auroc(flipped), a, 1e-15);

    auto swapped = r;
    for (auto& rec : swapped) rec.label = rec.label == Label::In ? Label::Out : Label::In;
    EXPECT_NEAR(auroc(swapped) + a, 1.0, 1e-15);
  }
}

TEST(Auroc, IidNullIsOneHalf) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<ScoreRecord> r(10000);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = {n(rng), i % 2 ? Label::Out : Label::In, ""};
  EXPECT_NEAR(auroc(r), 0.5, 0.02);
}

TEST(Roc, Examples) {
  const auto curve = roc_curve(make({0.2}, {0.8}));
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_TRUE(std::isinf(curve[0].threshold));
  EXPECT_EQ(curve[0].fpr, 0.0);
  EXPECT_EQ(curve[0].tpr, 0.0);
  EXPECT_EQ(curve[1].fpr, 0.0);
  EXPECT_EQ(curve[1].tpr, 1.0);
  EXPECT_EQ(curve[2].fpr, 1.0);
  EXPECT_EQ(curve[2].tpr, 1.0);

  bool through_corner = false;
  for (const auto& p : roc_curve(make({0.1, 0.2, 0.3}, {0.6, 0.7}))) through_corner |= p.fpr == 0.0 && p.tpr == 1.0;
  EXPECT_TRUE(through_corner);
}

TEST(Roc, TrapezoidEqualsAuroc) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = random_records(rng, 50);
    const auto curve = roc_curve(r);
    EXPECT_NEAR(trapezoid_area(curve), auroc(r), 1e-12);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_GE(curve[i].fpr, curve[i - 1].fpr);
      EXPECT_GE(curve[i].tpr, curve[i - 1].tpr);
      EXPECT_LT(curve[i].threshold, curve[i - 1].threshold);
    }
    EXPECT_EQ(curve.back().fpr, 1.0);
    EXPECT_EQ(curve.back().tpr, 1.0);
  }
}

TEST(Slices, IntervalArithmetic) {
  EXPECT_EQ(unit_interval_index(0.49, 50), 24u);
  EXPECT_EQ(unit_interval_index(0.51, 50), 25u);
  EXPECT_EQ(unit_interval_index(0.0, 50), 0u);
  EXPECT_EQ(unit_interval_index(1.0, 50), 49u);
  EXPECT_EQ(unit_interval_index(0.5, 2), 1u);

  const auto s = slice_analysis({{Label::In, 0.49, 0.1}, {Label::Out, 0.51, 0.2}}, 50);
  ASSERT_EQ(s.size(), 50u);
  EXPECT_EQ(s[24].in.count, 1u);
  EXPECT_EQ(s[25].out.count, 1u);
  EXPECT_FALSE(s[0].in.mean.has_value());
  EXPECT_DOUBLE_EQ(s[24].lo, 0.48);
  EXPECT_DOUBLE_EQ(s[24].hi, 0.5);
}

TEST(Slices, ConstantRemainingGivesZeroVariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SliceSample> samples;
  for (int i = 0; i < 300; ++i) samples.push_back({i % 3 ? Label::In : Label::Out, u(rng), 0.125});
  for (const auto& s : slice_analysis(samples, 10)) {
    for (const auto* m : {&s.in, &s.out}) {
      if (m->count == 0) continue;
      EXPECT_DOUBLE_EQ(*m->mean, 0.125);
      EXPECT_DOUBLE_EQ(*m->variance, 0.0);
    }
  }
}

TEST(Slices, SingleSliceIsGlobalMoments) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SliceSample> samples;
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (int i = 0; i < 500; ++i) {
    const SliceSample s{i % 2 ? Label::In : Label::Out, u(rng), u(rng) * 0.3};
    samples.push_back(s);
    if (s.label == Label::In) {
      sum += s.remaining;
      sq += s.remaining * s.remaining;
      ++n;
    }
  }
  const auto slices = slice_analysis(samples, 1);
  ASSERT_EQ(slices.size(), 1u);
  const double mean = sum / n;
  EXPECT_NEAR(*slices[0].in.mean, mean, 1e-12);
  EXPECT_NEAR(*slices[0].in.variance, sq / n - mean * mean, 1e-12);
  EXPECT_EQ(slices[0].in.count + slices[0].out.count, 500u);
  EXPECT_THROW(slice_analysis(samples, 0), InputError);
}

TEST(Histogram, Examples) {
  const Histogram h = histogram(make({0.0}, {}), 10);
  EXPECT_EQ(h.in[0], 1u);
  const Histogram top = histogram(make({}, {1.0}), 10);
  EXPECT_EQ(top.out[9], 1u);
  const Histogram clamped = histogram(make({-0.5}, {1.5, 0.3}), 4);
  EXPECT_EQ(clamped.in[0], 1u);
  EXPECT_EQ(clamped.out[3], 1u);
  EXPECT_EQ(clamped.clamped_in, 1u);
  EXPECT_EQ(clamped.clamped_out, 1u);
  EXPECT_THROW(histogram(make({0.1}, {}), 0), InputError);
}

TEST(Histogram, CountsConserved) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_records(rng, 200);
    const Histogram h = histogram(r, 1 + trial % 17);
    std::size_t in = 0, out = 0;
    for (std::size_t b = 0; b < h.n_bins; ++b) {
      in += h.in[b];
      out += h.out[b];
    }
    std::size_t expected_in = 0;
    for (const auto& rec : r) expected_in += rec.label == Label::In;
    EXPECT_EQ(in, expected_in);
    EXPECT_EQ(in + out, r.size());
  }
}

TEST(Exports, JsonAndCsvSchemas) {
  testutil::TempDir dir;
  const auto r = make({0.1, 0.3}, {0.2, 0.4});
  EvaluationSummary s;
  s.auroc = auroc(r);
  s.n_in = 2;
  s.n_out = 2;
  s.histogram = histogram(r, 2);
  s.slices = slice_analysis({{Label::In, 0.9, 0.05}}, 2);
  const auto doc = nlohmann::json::parse(summary_json(s));
  EXPECT_EQ(doc["auroc"], 0.75);
  EXPECT_EQ(doc["histogram"]["in"].size(), 2u);
  EXPECT_TRUE(doc["slices"][0]["in"]["mean"].is_null());
  EXPECT_EQ(doc["slices"][1]["in"]["count"], 1);

  write_roc_csv(roc_curve(r), dir / "roc.csv");
  const std::string roc = testutil::read_file(dir / "roc.csv");
  EXPECT_EQ(roc.rfind("fpr,tpr,threshold\n0,0,inf\n", 0), 0u) << roc;

  write_histogram_csv(s.histogram, dir / "h.csv");
  EXPECT_EQ(testutil::read_file(dir / "h.csv"),
            "lo,hi,label,count\n0,0.5,in,2\n0,0.5,out,2\n0.5,1,in,0\n0.5,1,out,0\n");

  write_slices_csv(s.slices, dir / "s.csv");
  EXPECT_EQ(testutil::read_file(dir / "s.csv"),
            "lo,hi,label,mean,var,count\n0,0.5,in,,,0\n0,0.5,out,,,0\n0.5,1,in,0.050000000000000003,0,1\n"
            "0.5,1,out,,,0\n");
}
