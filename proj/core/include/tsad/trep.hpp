#pragma once

// TREP container: a little-endian binary file of reference-patch embeddings.
//
//   offset  size  field
//   0       4     magic "TREP"
//   4       2     u16 version (= 1)
//   6       2     u16 flags (= 0)
//   8       4     u32 d_model
//   12      4     u32 layer
//   16      4     u32 reference_patch
//   20      8     u64 rows
//   28      ...   rows*d_model float32, row-major
//   ...     ...   rows u64 reference times
//   end-4   4     u32 CRC-32 (IEEE) of every preceding byte
//
// A JSON sidecar `<file>.meta.json` carries provider id, dataset name and the
// full window spec, plus free-form extras (bank provenance, novelty model).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "tsad/embedding.hpp"

namespace tsad {

inline constexpr std::uint16_t kTrepVersion = 1;
inline constexpr std::size_t kTrepHeaderSize = 28;

struct TrepSidecar {
  std::string provider_id;
  std::string dataset;
  WindowSpec spec;
  std::size_t layer = 0;
  std::size_t d_model = 0;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

std::filesystem::path sidecar_path(const std::filesystem::path& trep_path);

void write_trep(const EmbeddingMatrix& matrix, const EmbeddingConfig& meta,
                const std::filesystem::path& path);

/// Decodes and validates a TREP file. When a sidecar exists next to it, the
/// provider id and window spec are taken from there; otherwise only the
/// header fields are filled.
std::pair<EmbeddingMatrix, EmbeddingConfig> read_trep(const std::filesystem::path& path);

void write_sidecar(const std::filesystem::path& trep_path, const TrepSidecar& sidecar);
std::optional<TrepSidecar> read_sidecar(const std::filesystem::path& trep_path);

}  // namespace tsad
