#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tsad/data_ingest.hpp"
#include "tsad/errors.hpp"

using namespace tsad;
using tsad::testing::error_code_of;
using tsad::testing::TempDir;

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& body) {
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

TimeSeriesRecord ramp(std::size_t T, std::size_t train_end) {
  TimeSeriesRecord r;
  r.name = "ramp";
  r.values.resize(T);
  for (std::size_t i = 0; i < T; ++i) r.values[i] = static_cast<double>(i);
  r.train_end = train_end;
  r.anomaly_begin = r.anomaly_end = T - 1;
  return r;
}

WindowSpec spec(std::size_t L, std::size_t P, std::size_t p) {
  WindowSpec s;
  s.window_length = L;
  s.patch_length = P;
  s.reference_patch = p;
  return s;
}

}  // namespace

TEST(ParseUcr, ArchiveStyleName) {
  TempDir dir("ingest");
  std::string body;
  for (int i = 0; i < 8000; ++i) body += std::to_string(i % 17) + "\n";
  const auto rec = parse_ucr_file(write_file(dir.path(), "001_X_2500_5400_5600.txt", body));
  EXPECT_EQ(rec.name, "001_X");
  EXPECT_EQ(rec.train_end, 2500u);
  EXPECT_EQ(rec.anomaly_begin, 5400u);
  EXPECT_EQ(rec.anomaly_end, 5600u);
  EXPECT_EQ(rec.length(), 8000u);
}

TEST(ParseUcr, MinimalWellFormed) {
  TempDir dir("ingest");
  const auto rec = parse_ucr_file(write_file(dir.path(), "x_3_5_6.txt", "1 2 3 4 5 6 7 8"));
  EXPECT_EQ(rec.length(), 8u);
  EXPECT_EQ(rec.train_end, 3u);
  EXPECT_EQ(rec.anomaly_begin, 5u);
  EXPECT_EQ(rec.anomaly_end, 6u);
  EXPECT_EQ(rec.values, (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(ParseUcr, MixedWhitespaceAndScientific) {
  TempDir dir("ingest");
  const auto rec =
      parse_ucr_file(write_file(dir.path(), "s_2_3_3.txt", "  1.5e0\t-2\n\n+3.25\r\n4 5\n"));
  EXPECT_EQ(rec.values, (std::vector<double>{1.5, -2, 3.25, 4, 5}));
}

TEST(ParseUcr, AnomalyBeforeTrainEnd) {
  TempDir dir("ingest");
  const auto p = write_file(dir.path(), "x_10_5_6.txt", "1 2 3 4 5 6 7 8 9 10 11 12");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(p); }), Errc::RecordInvariant);
}

TEST(ParseUcr, DistinctErrors) {
  TempDir dir("ingest");
  const auto few = write_file(dir.path(), "x_5_6.txt", "1 2 3 4 5 6 7 8");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(few); }), Errc::MalformedFilename);
  const auto alpha = write_file(dir.path(), "x_a_5_6.txt", "1 2 3 4 5 6 7 8");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(alpha); }), Errc::MalformedFilename);
  const auto token = write_file(dir.path(), "x_3_5_6.txt", "1 2 3 four 5 6 7 8");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(token); }), Errc::NonNumericToken);
  const auto nan = write_file(dir.path(), "y_3_5_6.txt", "1 2 3 nan 5 6 7 8");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(nan); }), Errc::NonFiniteValue);
  const auto beyond = write_file(dir.path(), "z_3_5_9.txt", "1 2 3 4 5 6 7 8");
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(beyond); }), Errc::RecordInvariant);
  EXPECT_EQ(error_code_of([&] { parse_ucr_file(dir.path() / "missing_1_2_3.txt"); }),
            Errc::PathNotFound);
}

TEST(ParseUcr, WriteThenParseIsIdentity) {
  TempDir dir("ingest");
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 3.0);
  TimeSeriesRecord r;
  r.name = "roundtrip_case";
  for (int i = 0; i < 500; ++i) r.values.push_back(g(rng));
  r.values.push_back(1e-300);
  r.values.push_back(-0.1);
  r.train_end = 200;
  r.anomaly_begin = 300;
  r.anomaly_end = 320;
  const auto path = write_ucr_file(r, dir.path());
  EXPECT_EQ(path.filename(), "roundtrip_case_200_300_320.txt");
  const auto back = parse_ucr_file(path);
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.train_end, r.train_end);
  EXPECT_EQ(back.anomaly_begin, r.anomaly_begin);
  EXPECT_EQ(back.anomaly_end, r.anomaly_end);
}

TEST(ParseUcr, ManifestCarriesLabels) {
  auto r = ramp(10, 4);
  r.source = "a/b.txt";
  EXPECT_EQ(record_manifest_json(r),
            R"({"name":"ramp","T":10,"train_end":4,"a":9,"b":9,"source":"a/b.txt"})");
}

TEST(Windows, TrainLastAligned) {
  const auto r = ramp(10, 10);
  const auto w = generate_windows(r, spec(4, 2, 2), Region::Train);
  ASSERT_EQ(w.size(), 7u);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].reference_time, 3 + i);
    EXPECT_EQ(w[i].window_start + 3, w[i].reference_time);
    EXPECT_EQ(w[i].values.size(), 4u);
    EXPECT_EQ(w[i].values.front(), static_cast<double>(w[i].window_start));
  }
}

TEST(Windows, TestRegionMatchesEnumeration) {
  const auto r = ramp(10, 4);
  const auto s = spec(4, 2, 1);
  // Oracle: every placement, filtered by reference_time >= train_end and fit.
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t start = 0; start < r.length(); ++start) {
    const std::size_t ref = start + s.reference_patch * s.patch_length - 1;
    if (ref >= r.train_end && start + s.window_length <= r.length()) {
      expected.emplace_back(start, ref);
    }
  }
  ASSERT_EQ(expected.size(), 4u);  // starts {3,4,5,6}, references {4,5,6,7}
  const auto w = generate_windows(r, s, Region::Test);
  ASSERT_EQ(w.size(), expected.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].window_start, expected[i].first);
    EXPECT_EQ(w[i].reference_time, expected[i].second);
  }
}

TEST(Windows, EmptyRegionErrors) {
  const auto r = ramp(10, 3);
  EXPECT_EQ(error_code_of([&] { generate_windows(r, spec(4, 2, 2), Region::Train); }),
            Errc::EmptyRegion);
  const auto tiny = ramp(3, 1);
  EXPECT_EQ(error_code_of([&] { generate_windows(tiny, spec(4, 2, 2), Region::Test); }),
            Errc::EmptyRegion);
}

TEST(Windows, InvalidSpec) {
  const auto r = ramp(20, 10);
  EXPECT_EQ(error_code_of([&] { generate_windows(r, spec(5, 2, 1), Region::Train); }),
            Errc::InvalidWindowSpec);
  EXPECT_EQ(error_code_of([&] { generate_windows(r, spec(4, 2, 3), Region::Train); }),
            Errc::InvalidWindowSpec);
  EXPECT_EQ(error_code_of([&] { generate_windows(r, spec(4, 2, 0), Region::Train); }),
            Errc::InvalidWindowSpec);
}

TEST(Windows, Presets) {
  EXPECT_EQ(WindowSpec::center().reference_patch, 32u);
  EXPECT_EQ(WindowSpec::last().reference_patch, 64u);
  EXPECT_EQ(WindowSpec::last().reference_offset(), 511u);
  EXPECT_EQ(WindowSpec::center().reference_offset(), 255u);
}

TEST(Windows, StrideSpacing) {
  const auto r = ramp(50, 40);
  auto s = spec(8, 2, 4);
  s.stride = 3;
  const auto w = generate_windows(r, s, Region::Train);
  ASSERT_FALSE(w.empty());
  for (std::size_t i = 1; i < w.size(); ++i) {
    EXPECT_EQ(w[i].reference_time - w[i - 1].reference_time, 3u);
  }
  EXPECT_EQ(w.size(), count_windows(r, s, Region::Train));
}

// Property: over random (L, P, p, T, train_end) every window satisfies the
// reference identity, train count matches the closed form and test windows
// stay inside the series.
TEST(Windows, RandomSpecsProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t P = 1 + rng() % 8;
    const std::size_t N = 1 + rng() % 10;
    const std::size_t L = P * N;
    const std::size_t p = 1 + rng() % N;
    const std::size_t T = L + 2 + rng() % 60;
    const std::size_t train_end = 1 + rng() % (T - 1);
    const auto r = ramp(T, train_end);
    const auto s = spec(L, P, p);

    if (train_end >= L) {
      const auto train = generate_windows(r, s, Region::Train);
      EXPECT_EQ(train.size(), train_end - L + 1);
      for (const auto& w : train) {
        EXPECT_EQ(w.reference_time, w.window_start + p * P - 1);
        EXPECT_LE(w.window_start + L, train_end);
      }
    } else {
      EXPECT_THROW(generate_windows(r, s, Region::Train), Error);
    }

    std::vector<Window> test;
    try {
      test = generate_windows(r, s, Region::Test);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::EmptyRegion);
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      EXPECT_EQ(test[i].reference_time, test[i].window_start + p * P - 1);
      EXPECT_GE(test[i].reference_time, train_end);
      EXPECT_LE(test[i].window_start + L, T);
      if (i > 0) EXPECT_EQ(test[i].reference_time, test[i - 1].reference_time + 1);
    }
  }
}
