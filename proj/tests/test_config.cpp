#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tsad/config.hpp"

using namespace tsad;
using tsad::testing::error_code_of;
using tsad::testing::TempDir;

TEST(Config, DefaultsResolve) {
  RunConfig c;
  c.resolve();
  EXPECT_EQ(c.window.window_length, 512u);
  EXPECT_EQ(c.window.patch_length, 8u);
  EXPECT_EQ(c.window.reference_patch, 32u);
  EXPECT_TRUE(c.ttamb);
  EXPECT_EQ(c.novelty_q, 80.0);
  EXPECT_EQ(c.eval.tolerance, 100u);
  EXPECT_EQ(c.eval.alphas, (std::vector<double>{0.03, 0.10}));
}

TEST(Config, ReferencePresets) {
  RunConfig c;
  apply_setting(c, "reference", "last");
  c.resolve();
  EXPECT_EQ(c.window.reference_patch, 64u);
  apply_setting(c, "reference", "7");
  c.resolve();
  EXPECT_EQ(c.window.reference_patch, 7u);
  apply_setting(c, "reference", "65");
  EXPECT_EQ(error_code_of([&] { c.resolve(); }), Errc::InvalidWindowSpec);
  EXPECT_EQ(error_code_of([&] { apply_setting(c, "reference", "middle"); }), Errc::ConfigError);
}

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.datasets = {"data/*.txt", "more"};
  c.window.window_length = 256;
  c.window.stride = 2;
  c.reference = "last";
  c.embedding = EmbeddingSource::Trep;
  c.trep_dir = "/tmp/emb";
  c.layer = 12;
  c.coreset = 1000;
  c.seed = 42;
  c.distance.kind = DistanceKind::Density;
  c.distance.neighbors = 7;
  c.distance.include_nearest = false;
  c.distance.ridge = 0.125;
  c.ttamb = false;
  c.novelty_q = 95.5;
  c.capacity = 3000;
  c.eval.tolerance = 50;
  c.eval.alphas = {0.01, 0.2};
  c.out_dir = "outdir";
  c.workers = 3;
  const auto text = to_config_text(c);
  const auto back = parse_config_text(text);
  EXPECT_EQ(to_config_text(back), text);
  EXPECT_EQ(back.datasets, c.datasets);
  EXPECT_EQ(back.coreset, c.coreset);
  EXPECT_EQ(back.distance.kind, DistanceKind::Density);
  EXPECT_FALSE(back.distance.include_nearest);
  EXPECT_EQ(back.eval.alphas, c.eval.alphas);
}

TEST(Config, CommentsAndBlankLines) {
  const auto c = parse_config_text("# run\n\n  coreset = 500  # cap\nttamb=off\n");
  EXPECT_EQ(c.coreset, 500u);
  EXPECT_FALSE(c.ttamb);
}

TEST(Config, Errors) {
  EXPECT_EQ(error_code_of([] { parse_config_text("colour = blue\n"); }), Errc::ConfigError);
  EXPECT_EQ(error_code_of([] { parse_config_text("coreset\n"); }), Errc::ConfigError);
  EXPECT_EQ(error_code_of([] { parse_config_text("coreset = many\n"); }), Errc::ConfigError);
  EXPECT_EQ(error_code_of([] { parse_config_text("workers = 0\n"); }), Errc::ConfigError);
  EXPECT_EQ(error_code_of([] { parse_config_text("distance = cosine\n"); }), Errc::ConfigError);
  RunConfig c;
  EXPECT_EQ(error_code_of([&] { apply_override(c, "coreset"); }), Errc::ConfigError);
  apply_setting(c, "embedding", "trep");
  EXPECT_EQ(error_code_of([&] { c.resolve(); }), Errc::ConfigError);
  EXPECT_EQ(error_code_of([] { load_config_file("/nonexistent/run.cfg"); }), Errc::PathNotFound);
  RunConfig bad_alpha;
  apply_setting(bad_alpha, "alphas", "0.5,1.5");
  EXPECT_EQ(error_code_of([&] { bad_alpha.resolve(); }), Errc::ConfigError);
}

TEST(Config, OverridesAndFile) {
  TempDir dir("config");
  const auto path = dir.path() / "run.cfg";
  std::ofstream(path) << "coreset = 100\ndistance = mahalanobis\n";
  auto c = load_config_file(path);
  apply_override(c, "coreset=unbounded");
  apply_override(c, " ridge = 0.01");
  EXPECT_FALSE(c.coreset.has_value());
  EXPECT_EQ(c.distance.kind, DistanceKind::Mahalanobis);
  EXPECT_EQ(c.distance.ridge, 0.01);
}

TEST(Config, Environment) {
  RunConfig c;
  ::setenv("TSAD_WORKERS", "4", 1);
  ::setenv("TSAD_OUT_DIR", "/tmp/env_out", 1);
  apply_environment(c);
  ::unsetenv("TSAD_WORKERS");
  ::unsetenv("TSAD_OUT_DIR");
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.out_dir, "/tmp/env_out");
}

TEST(Config, EchoOmitsLocalSettings) {
  RunConfig a, b;
  b.out_dir = "elsewhere";
  b.workers = 8;
  a.resolve();
  b.resolve();
  EXPECT_EQ(config_echo(a), config_echo(b));
  EXPECT_FALSE(config_echo(a).contains("out_dir"));
  EXPECT_EQ(config_echo(a)["reference_patch"], 32);
  const auto keys = config_keys();
  EXPECT_EQ(keys.size(), 22u);
}
