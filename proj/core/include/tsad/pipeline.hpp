#pragma once

// End-to-end composition used by the command-line tool: ingestion, embedding,
// bank construction, scoring with optional adaptation, and evaluation.
//
// Output layout under RunConfig::out_dir:
//   <dataset>/bank.trep (+ .meta.json)   build-memory
//   <dataset>/scores.csv                 score, eval
//   <dataset>/score_report.json          score, eval
//   report.json, report.txt              eval
//   sweep_<axis>.csv                     sweep (value,top1)
//   sweep_<axis>/<value>/...             sweep, one eval tree per value

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsad/config.hpp"
#include "tsad/data_ingest.hpp"
#include "tsad/embedding.hpp"
#include "tsad/eval.hpp"
#include "tsad/membank.hpp"
#include "tsad/scoring.hpp"

namespace tsad {

/// 64-bit FNV-1a.
std::uint64_t stable_hash(std::string_view text) noexcept;
/// Master seed XOR stable hash of the dataset name.
std::uint64_t dataset_seed(std::uint64_t master_seed, std::string_view dataset_name) noexcept;

/// Expands files, directories (every *.txt inside) and glob patterns; sorted
/// and de-duplicated. Throws Errc::PathNotFound when nothing matches.
std::vector<std::filesystem::path> resolve_datasets(const std::vector<std::string>& patterns);

/// Where an exported embedding file for (dataset, layer, patch, region) lives.
std::filesystem::path trep_input_path(const std::filesystem::path& trep_dir,
                                      const std::string& dataset, std::size_t layer,
                                      std::size_t reference_patch, Region region);

/// Embeddings of every window of a region under the configured source.
EmbeddingMatrix region_embeddings(const TimeSeriesRecord& record, const RunConfig& config,
                                  Region region, EmbeddingConfig* used = nullptr);

struct BankArtifact {
  MemoryBank bank;
  NoveltyModel novelty;
  std::size_t original_size = 0;
  std::size_t start_index = 0;
  std::uint64_t seed = 0;
  EmbeddingConfig embedding;
};

BankArtifact build_memory(const TimeSeriesRecord& record, const RunConfig& config);
void write_bank_artifact(const std::filesystem::path& trep_path, const std::string& dataset,
                         const BankArtifact& artifact, const RunConfig& config);
BankArtifact read_bank_artifact(const std::filesystem::path& trep_path);

struct DatasetRun {
  DatasetResult result;
  ScoreRun score;
  NoveltyModel novelty;
};

/// Scores the test region against `artifact` (copied; adaptation never
/// mutates the caller's bank) and evaluates the result.
DatasetRun score_and_evaluate(const TimeSeriesRecord& record, const BankArtifact& artifact,
                              const RunConfig& config);

DatasetRun run_dataset(const TimeSeriesRecord& record, const RunConfig& config);

struct CommandOutcome {
  std::vector<std::string> succeeded;
  std::vector<FailedDataset> failed;
  bool ok() const noexcept { return failed.empty(); }
};

CommandOutcome cmd_build_memory(const RunConfig& config);
CommandOutcome cmd_score(const RunConfig& config);

struct EvalOutcome {
  Report report;
  bool ok() const noexcept { return report.failed.empty(); }
};

EvalOutcome cmd_eval(const RunConfig& config);

enum class SweepAxis { Layer, ReferencePatch, CoresetSize, Distance };

SweepAxis parse_sweep_axis(const std::string& name);
const char* sweep_axis_name(SweepAxis axis) noexcept;

struct SweepPoint {
  std::string value;
  Report report;
};

/// Runs cmd_eval once per value with everything else fixed. With
/// embedding=trep, every required input file is checked up front and a
/// missing one raises Errc::MissingArtifact listing all of them.
std::vector<SweepPoint> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                  const std::vector<std::string>& values);

/// Applies one sweep value to a copy of the configuration.
RunConfig with_sweep_value(const RunConfig& config, SweepAxis axis, const std::string& value);

/// Writes the suite as UCR files into `dir`. Returns the written paths.
std::vector<std::filesystem::path> cmd_synth_data(const std::filesystem::path& dir,
                                                  std::size_t count, std::size_t length,
                                                  std::size_t train_end, std::uint64_t seed);

}  // namespace tsad
