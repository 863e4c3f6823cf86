#include "tsad/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tsad/errors.hpp"

namespace tsad {

void EmbeddingConfig::validate() const {
  if (d_model == 0) throw Error(Errc::InvalidArgument, "d_model must be positive");
  if (layer < 1) throw Error(Errc::InvalidArgument, "layer index must be >= 1");
  spec.validate();
}

void EmbeddingMatrix::validate() const {
  if (data.size() != rows * dim) {
    throw Error(Errc::InvalidMatrix, "data holds " + std::to_string(data.size()) +
                                         " values, expected rows*dim = " +
                                         std::to_string(rows * dim));
  }
  if (reference_times.size() != rows) {
    throw Error(Errc::InvalidMatrix, "reference_times has " +
                                         std::to_string(reference_times.size()) +
                                         " entries for " + std::to_string(rows) + " rows");
  }
  for (std::size_t i = 1; i < rows; ++i) {
    if (reference_times[i] <= reference_times[i - 1]) {
      throw Error(Errc::InvalidMatrix,
                  "reference_times not strictly increasing at row " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(Errc::InvalidMatrix, "non-finite entry at row " + std::to_string(i / dim));
    }
  }
}

SyntheticProvider::SyntheticProvider(std::uint64_t seed, std::size_t d_model,
                                     std::size_t patch_length)
    : seed_(seed), d_model_(d_model), patch_length_(patch_length),
      weights_(d_model * patch_length) {
  // Raw engine output and explicit bit manipulation keep the map identical
  // across standard libraries (distribution objects are not portable).
  std::mt19937_64 rng(seed);
  const double scale = std::sqrt(3.0 / static_cast<double>(patch_length));
  for (double& w : weights_) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    w = (2.0 * u - 1.0) * scale;
  }
}

std::string SyntheticProvider::id() const { return "synthetic:" + std::to_string(seed_); }

void SyntheticProvider::embed_into(const Window& window, const EmbeddingConfig& config,
                                   std::span<float> out) const {
  const auto& spec = config.spec;
  if (window.values.size() != spec.window_length) {
    throw Error(Errc::InvalidArgument, "window length " + std::to_string(window.values.size()) +
                                           " != configured " +
                                           std::to_string(spec.window_length));
  }
  if (spec.patch_length != patch_length_ || out.size() != d_model_) {
    throw Error(Errc::DimensionMismatch, "synthetic provider built for P=" +
                                             std::to_string(patch_length_) + ", d_model=" +
                                             std::to_string(d_model_));
  }

  const double n = static_cast<double>(window.values.size());
  double mean = 0.0;
  for (double v : window.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : window.values) var += (v - mean) * (v - mean);
  const double sd = std::max(std::sqrt(var / n), kStdEpsilon);

  std::vector<double> patch(patch_length_);
  const std::size_t first = (spec.reference_patch - 1) * patch_length_;
  for (std::size_t j = 0; j < patch_length_; ++j) {
    patch[j] = (window.values[first + j] - mean) / sd;
  }

  for (std::size_t i = 0; i < d_model_; ++i) {
    const double* w = weights_.data() + i * patch_length_;
    double acc = 0.0;
    for (std::size_t j = 0; j < patch_length_; ++j) acc += w[j] * patch[j];
    out[i] = static_cast<float>(std::tanh(acc));
  }
}

MatrixProvider::MatrixProvider(EmbeddingMatrix matrix, std::string id)
    : matrix_(std::move(matrix)), id_(std::move(id)) {
  matrix_.validate();
}

void MatrixProvider::embed_into(const Window& window, const EmbeddingConfig&,
                                std::span<float> out) const {
  const auto& times = matrix_.reference_times;
  const auto it = std::lower_bound(times.begin(), times.end(), window.reference_time);
  if (it == times.end() || *it != window.reference_time) {
    throw Error(Errc::ProviderUnavailable, "provider '" + id_ + "' has no row for reference time " +
                                               std::to_string(window.reference_time));
  }
  if (out.size() != matrix_.dim) {
    throw Error(Errc::DimensionMismatch, "provider '" + id_ + "' has dim " +
                                             std::to_string(matrix_.dim) + ", expected " +
                                             std::to_string(out.size()));
  }
  const auto row = matrix_.row(static_cast<std::size_t>(it - times.begin()));
  std::copy(row.begin(), row.end(), out.begin());
}

EmbeddingMatrix embed(const EmbeddingProvider& provider, std::span<const Window> windows,
                      const EmbeddingConfig& config) {
  if (provider.dim() != config.d_model) {
    throw Error(Errc::DimensionMismatch, "provider '" + provider.id() + "' emits dim " +
                                             std::to_string(provider.dim()) + " but d_model is " +
                                             std::to_string(config.d_model));
  }
  EmbeddingMatrix m(windows.size(), config.d_model);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].values.size() != config.spec.window_length) {
      throw Error(Errc::InvalidArgument, "window " + std::to_string(i) + " has length " +
                                             std::to_string(windows[i].values.size()));
    }
    provider.embed_into(windows[i], config, m.row(i));
    m.reference_times[i] = windows[i].reference_time;
  }
  return m;
}

std::vector<float> synthetic_embed(const Window& window, const EmbeddingConfig& config,
                                   std::uint64_t seed) {
  SyntheticProvider provider(seed, config.d_model, config.spec.patch_length);
  std::vector<float> out(config.d_model);
  provider.embed_into(window, config, out);
  return out;
}

}  // namespace tsad
