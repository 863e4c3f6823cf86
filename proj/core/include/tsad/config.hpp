#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsad/data_ingest.hpp"
#include "tsad/eval.hpp"
#include "tsad/scoring.hpp"

namespace tsad {

enum class EmbeddingSource { Synthetic, Trep };

/// Fully resolved run configuration. The text form is a flat `key = value`
/// document; `#` starts a comment. Unknown keys are rejected.
///
///   datasets                 comma-separated files, directories or globs
///   window_length            L (512)
///   patch_length             P (8)
///   stride                   (1)
///   reference                center | last | <1-based patch index>
///   embedding                synthetic | trep
///   trep_dir                 root of <dataset>/layer<l>_patch<p>_<region>.trep
///   layer                    (16)
///   d_model                  synthetic provider width (1024)
///   coreset                  unbounded | <max size>
///   seed                     master seed (0)
///   distance                 euclidean | mahalanobis | density
///   density_b                (5)
///   density_include_nearest  true | false
///   ridge                    mahalanobis lambda (1e-3)
///   ttamb                    on | off
///   novelty_q                percentile for tau (80)
///   capacity                 unbounded | <max bank size under adaptation>
///   delta                    Top-1 tolerance (100)
///   alphas                   comma-separated alpha levels (0.03,0.10)
///   out_dir                  output root
///   workers                  dataset-level worker threads (1)
struct RunConfig {
  std::vector<std::string> datasets;
  WindowSpec window = WindowSpec::center();
  std::string reference = "center";
  EmbeddingSource embedding = EmbeddingSource::Synthetic;
  std::filesystem::path trep_dir;
  std::size_t layer = 16;
  std::size_t d_model = 1024;
  std::optional<std::size_t> coreset;
  std::uint64_t seed = 0;
  DistanceSpec distance;
  bool ttamb = true;
  double novelty_q = 80.0;
  std::optional<std::size_t> capacity;
  EvalConfig eval;
  std::filesystem::path out_dir = "tsad_out";
  std::size_t workers = 1;

  /// Re-derives window.reference_patch from `reference` and checks ranges.
  void resolve();
};

std::vector<std::string> config_keys();

void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Parses `key=value` as given to --set.
void apply_override(RunConfig& config, const std::string& assignment);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

/// Settings that influence results (out_dir and workers are omitted).
nlohmann::ordered_json config_echo(const RunConfig& config);

/// TSAD_WORKERS and TSAD_OUT_DIR.
void apply_environment(RunConfig& config);

}  // namespace tsad
