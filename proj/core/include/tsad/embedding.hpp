#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsad/data_ingest.hpp"

namespace tsad {

struct EmbeddingConfig {
  std::size_t layer = 16;  // opaque to the engine; 1-based block output index
  std::size_t d_model = 1024;
  WindowSpec spec;
  std::string provider_id;

  void validate() const;
};

/// Row-major float32 matrix with one row per window, tagged by the window's
/// reference time.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> data;
  std::vector<std::uint64_t> reference_times;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows_, std::size_t dim_)
      : rows(rows_), dim(dim_), data(rows_ * dim_, 0.0f), reference_times(rows_, 0) {}

  std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
  std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }

  /// Throws Errc::InvalidMatrix on shape, ordering or finiteness violations.
  void validate() const;

  bool operator==(const EmbeddingMatrix&) const = default;
};

/// Maps one window to its reference-patch representation. Implementations
/// must be safe for concurrent const use.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual void embed_into(const Window& window, const EmbeddingConfig& config,
                          std::span<float> out) const = 0;
};

/// Deterministic stand-in for a foundation model: z-normalize the window,
/// take the reference patch, project with a seeded linear map and apply tanh.
class SyntheticProvider final : public EmbeddingProvider {
 public:
  SyntheticProvider(std::uint64_t seed, std::size_t d_model, std::size_t patch_length);

  std::string id() const override;
  std::size_t dim() const override { return d_model_; }
  void embed_into(const Window& window, const EmbeddingConfig& config,
                  std::span<float> out) const override;

  static constexpr double kStdEpsilon = 1e-8;

 private:
  std::uint64_t seed_;
  std::size_t d_model_;
  std::size_t patch_length_;
  std::vector<double> weights_;  // d_model x patch_length, row-major
};

/// Serves rows of a precomputed matrix (e.g. an exported TREP file) by the
/// window's reference time.
class MatrixProvider final : public EmbeddingProvider {
 public:
  MatrixProvider(EmbeddingMatrix matrix, std::string id);

  std::string id() const override { return id_; }
  std::size_t dim() const override { return matrix_.dim; }
  void embed_into(const Window& window, const EmbeddingConfig& config,
                  std::span<float> out) const override;

 private:
  EmbeddingMatrix matrix_;
  std::string id_;
};

EmbeddingMatrix embed(const EmbeddingProvider& provider, std::span<const Window> windows,
                      const EmbeddingConfig& config);

std::vector<float> synthetic_embed(const Window& window, const EmbeddingConfig& config,
                                   std::uint64_t seed);

}  // namespace tsad
