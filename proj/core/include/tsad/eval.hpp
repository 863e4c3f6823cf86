#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsad/data_ingest.hpp"
#include "tsad/scoring.hpp"

namespace tsad {

struct EvalConfig {
  std::size_t tolerance = 100;  // Delta
  std::vector<double> alphas{0.03, 0.10};

  void validate() const;
};

struct Top1Result {
  std::size_t argmax_time = 0;
  bool hit = false;
};

/// Argmax over defined scores at or after train_end (earliest time wins
/// ties); hit when it lies in [a - delta, b + delta].
Top1Result top1(const ScoreSeries& scores, const TimeSeriesRecord& record, std::size_t delta);

/// True when any of the ceil(alpha * n) highest-scoring test steps lies in
/// the delta-padded anomaly interval; n counts defined test scores.
bool alpha_quantile(const ScoreSeries& scores, const TimeSeriesRecord& record, double alpha,
                    std::size_t delta);

/// Canonical key for an alpha level: at least two decimals ("0.03", "0.10").
std::string alpha_key(double alpha);

struct DatasetResult {
  std::string name;
  bool top1_hit = false;
  std::size_t argmax_time = 0;
  std::map<double, bool> alpha_hits;
  double reduction_ratio = 0.0;
  std::size_t insertion_count = 0;
  std::size_t bank_size = 0;     // before compression
  std::size_t coreset_size = 0;  // after compression

  bool operator==(const DatasetResult&) const = default;
};

double reduction_ratio(std::size_t coreset_size, std::size_t original_size);

struct FailedDataset {
  std::string name;
  std::string error;
};

struct Report {
  double top1_accuracy_pct = 0.0;
  std::size_t hits = 0;
  std::vector<DatasetResult> per_dataset;  // sorted by name
  std::map<double, std::size_t> alpha_counts;
  double mean_reduction_ratio = 0.0;
  std::vector<FailedDataset> failed;
  nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
};

/// Order-free reduction over per-dataset results.
Report aggregate(std::span<const DatasetResult> results);

nlohmann::ordered_json report_to_json(const Report& report);
std::string report_table(const Report& report);

}  // namespace tsad
