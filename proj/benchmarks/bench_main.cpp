#include <random>

#include <benchmark/benchmark.h>

#include "tsad/embedding.hpp"
#include "tsad/membank.hpp"
#include "tsad/scoring.hpp"

namespace {

tsad::EmbeddingMatrix random_rows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  tsad::EmbeddingMatrix m(rows, dim);
  for (auto& v : m.data) v = u(rng);
  for (std::size_t i = 0; i < rows; ++i) m.reference_times[i] = i;
  return m;
}

// args: bank size, dimension
void BM_NearestNeighbor(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto bank = tsad::build_bank(random_rows(K, d, 1));
  const auto queries = random_rows(64, d, 2);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsad::nearest_neighbor(bank, queries.row(q++ % queries.rows)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(K));
}
BENCHMARK(BM_NearestNeighbor)->Args({1000, 1024})->Args({4000, 1024})->Args({1000, 128});

// args: training rows, coreset size
void BM_KCenterCoreset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto bank = tsad::build_bank(random_rows(n, 128, 3));
  for (auto _ : state) benchmark::DoNotOptimize(tsad::kcenter_coreset(bank, k, 0));
}
BENCHMARK(BM_KCenterCoreset)->Args({1500, 100})->Args({1500, 1000})->Unit(benchmark::kMillisecond);

// args: bank size, b
void BM_DensityScore(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  const auto bank = tsad::build_bank(random_rows(K, 1024, 4));
  const auto queries = random_rows(16, 1024, 5);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsad::distance_density(queries.row(q++ % queries.rows), bank, b));
  }
}
BENCHMARK(BM_DensityScore)->Args({1000, 5})->Args({1000, 20});

void BM_MahalanobisScore(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto bank = tsad::build_bank(random_rows(2 * d, d, 6));
  const auto cov = tsad::fit_covariance(bank, 1e-3);
  const auto queries = random_rows(16, d, 7);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tsad::distance_mahalanobis(queries.row(q++ % queries.rows), bank.item(0), cov));
  }
}
BENCHMARK(BM_MahalanobisScore)->Arg(128)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
