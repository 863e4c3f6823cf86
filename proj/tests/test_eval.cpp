#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tsad/eval.hpp"

using namespace tsad;
using tsad::testing::error_code_of;

namespace {

TimeSeriesRecord labelled(std::size_t T, std::size_t train_end, std::size_t a, std::size_t b) {
  TimeSeriesRecord r;
  r.name = "rec";
  r.values.assign(T, 0.0);
  r.train_end = train_end;
  r.anomaly_begin = a;
  r.anomaly_end = b;
  return r;
}

ScoreSeries spike_at(std::size_t begin, std::size_t end, std::size_t t, double peak = 5.0) {
  ScoreSeries s(begin, end);
  for (std::size_t i = begin; i < end; ++i) s.set(i, 1.0);
  s.set(t, peak);
  return s;
}

DatasetResult result(const std::string& name, bool hit, double ratio = 0.5) {
  DatasetResult d;
  d.name = name;
  d.top1_hit = hit;
  d.reduction_ratio = ratio;
  d.alpha_hits = {{0.03, hit}, {0.10, true}};
  return d;
}

}  // namespace

TEST(Top1, ToleranceBoundaries) {
  const auto rec = labelled(1000, 300, 500, 600);
  EXPECT_TRUE(top1(spike_at(300, 1000, 450), rec, 100).hit);
  EXPECT_TRUE(top1(spike_at(300, 1000, 400), rec, 100).hit);
  EXPECT_FALSE(top1(spike_at(300, 1000, 399), rec, 100).hit);
  EXPECT_TRUE(top1(spike_at(300, 1000, 700), rec, 100).hit);
  EXPECT_FALSE(top1(spike_at(300, 1000, 701), rec, 100).hit);
  EXPECT_EQ(top1(spike_at(300, 1000, 450), rec, 100).argmax_time, 450u);
}

TEST(Top1, SmallAnomalyIndexWithLargeDelta) {
  const auto rec = labelled(200, 10, 20, 25);
  EXPECT_TRUE(top1(spike_at(10, 200, 10), rec, 100).hit);
}

TEST(Top1, EarliestTieWins) {
  ScoreSeries s(10, 13);
  s.set(10, 0.5);
  s.set(11, 0.9);
  s.set(12, 0.9);
  const auto rec = labelled(20, 10, 11, 11);
  EXPECT_EQ(top1(s, rec, 0).argmax_time, 11u);
}

TEST(Top1, IgnoresTrainRegionAndUndefined) {
  ScoreSeries s(0, 20);
  s.set(3, 100.0);  // before train_end, ignored
  s.set(15, 2.0);
  const auto rec = labelled(20, 10, 15, 15);
  EXPECT_EQ(top1(s, rec, 0).argmax_time, 15u);
  ScoreSeries only_train(0, 20);
  only_train.set(3, 1.0);
  EXPECT_EQ(error_code_of([&] { top1(only_train, rec, 0); }), Errc::NoDefinedScores);
}

// Property: any strictly increasing transform leaves argmax and hit alone.
TEST(Top1, MonotoneTransformInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rec = labelled(400, 100, 150 + rng() % 200, 360);
    ScoreSeries s(100, 400), t(100, 400);
    for (std::size_t i = 100; i < 400; ++i) {
      const double v = std::round(u(rng) * 4) / 4;  // coarse grid forces ties
      s.set(i, v);
      t.set(i, std::exp(3.0 * v) + 7.0);
    }
    const auto a = top1(s, rec, 10);
    const auto b = top1(t, rec, 10);
    EXPECT_EQ(a.argmax_time, b.argmax_time);
    EXPECT_EQ(a.hit, b.hit);
  }
}

TEST(AlphaQuantile, FullQuantileAlwaysHits) {
  const auto rec = labelled(200, 100, 150, 150);
  EXPECT_TRUE(alpha_quantile(spike_at(100, 200, 101), rec, 1.0, 0));
}

TEST(AlphaQuantile, CandidateCount) {
  // n = 1000 scores strictly decreasing from t=0; anomaly at rank k.
  ScoreSeries s(0, 1000);
  for (std::size_t i = 0; i < 1000; ++i) s.set(i, 1000.0 - static_cast<double>(i));
  EXPECT_TRUE(alpha_quantile(s, labelled(1000, 0, 29, 29), 0.03, 0));   // rank 30
  EXPECT_FALSE(alpha_quantile(s, labelled(1000, 0, 30, 30), 0.03, 0));  // rank 31
}

TEST(AlphaQuantile, SingleCandidate) {
  const auto rec = labelled(200, 100, 150, 150);
  EXPECT_TRUE(alpha_quantile(spike_at(100, 200, 150), rec, 0.001, 0));
  EXPECT_FALSE(alpha_quantile(spike_at(100, 200, 151), rec, 0.001, 0));
  EXPECT_EQ(error_code_of([&] { alpha_quantile(spike_at(100, 200, 150), rec, 0.0, 0); }),
            Errc::InvalidArgument);
}

// Property: a hit at alpha stays a hit at every larger alpha.
TEST(AlphaQuantile, MonotoneInAlpha) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> alphas{0.001, 0.01, 0.03, 0.05, 0.1, 0.2, 0.5, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto rec = labelled(500, 100, 100 + rng() % 390, 495);
    ScoreSeries s(100, 500);
    for (std::size_t i = 100; i < 500; ++i) s.set(i, u(rng));
    bool seen = false;
    for (double a : alphas) {
      const bool hit = alpha_quantile(s, rec, a, 5);
      if (seen) EXPECT_TRUE(hit);
      seen = seen || hit;
    }
  }
}

TEST(Aggregate, PublishedAccuracy) {
  std::vector<DatasetResult> rs;
  for (int i = 0; i < 250; ++i) rs.push_back(result("d" + std::to_string(1000 + i), i < 194));
  const auto rep = aggregate(rs);
  EXPECT_EQ(rep.hits, 194u);
  EXPECT_NEAR(rep.top1_accuracy_pct, 77.6, 1e-9);
  EXPECT_EQ(rep.per_dataset.size(), 250u);
}

TEST(Aggregate, CountsAndSingle) {
  const std::vector<DatasetResult> three{result("a", true), result("b", false), result("c", true)};
  const auto rep = aggregate(three);
  EXPECT_EQ(rep.alpha_counts.at(0.03), 2u);
  EXPECT_EQ(rep.alpha_counts.at(0.10), 3u);
  EXPECT_DOUBLE_EQ(rep.mean_reduction_ratio, 0.5);
  const std::vector<DatasetResult> one{result("x", true)};
  EXPECT_EQ(aggregate(one).top1_accuracy_pct, 100.0);
  EXPECT_EQ(error_code_of([] { aggregate({}); }), Errc::EmptyResults);
}

// Property: aggregation is order-free, down to the serialized report.
TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::vector<DatasetResult> rs;
  for (int i = 0; i < 40; ++i) {
    rs.push_back(result("s" + std::to_string(i), rng() % 2 == 0, double(rng() % 100) / 100.0));
  }
  const auto ref = report_to_json(aggregate(rs)).dump();
  for (int i = 0; i < 10; ++i) {
    std::shuffle(rs.begin(), rs.end(), rng);
    EXPECT_EQ(report_to_json(aggregate(rs)).dump(), ref);
  }
}

TEST(Report, JsonShapeAndKeys) {
  const std::vector<DatasetResult> rs{result("b", false), result("a", true)};
  auto rep = aggregate(rs);
  rep.failed.push_back({"c", "empty-region: too short"});
  const auto j = report_to_json(rep);
  EXPECT_EQ(j["per_dataset"][0]["name"], "a");
  EXPECT_EQ(j["alpha_counts"]["0.03"], 1);
  EXPECT_EQ(j["alpha_counts"]["0.10"], 2);
  EXPECT_EQ(j["failed"][0]["name"], "c");
  EXPECT_NE(report_table(rep).find("50"), std::string::npos);
  EXPECT_EQ(alpha_key(0.1), "0.10");
  EXPECT_EQ(alpha_key(0.125), "0.125");
  EXPECT_EQ(alpha_key(1.0), "1.00");
}

TEST(ReductionRatio, Values) {
  EXPECT_NEAR(reduction_ratio(100, 300), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(reduction_ratio(300, 300), 0.0);
}
