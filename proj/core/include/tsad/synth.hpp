#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsad/data_ingest.hpp"

namespace tsad {

enum class AnomalyKind { Spike, Flatline, FrequencyBurst, NoiseBurst };

const char* anomaly_kind_name(AnomalyKind kind) noexcept;

struct SynthSuiteSpec {
  std::size_t count = 20;
  std::size_t length = 4000;
  std::size_t train_end = 2000;
  std::uint64_t seed = 7;
  double noise = 0.05;
  /// Anomalies are placed so their padded neighbourhood stays scorable under
  /// a centre-aligned window of this length.
  std::size_t window_length = 512;
};

/// Noisy sine waves with one injected anomaly each. The anomaly kind cycles
/// through AnomalyKind; its position and extent are encoded in the record
/// labels.
std::vector<TimeSeriesRecord> make_synthetic_suite(const SynthSuiteSpec& spec);

}  // namespace tsad
