#include "tsad/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

// Portable draws: standard distribution objects differ between libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

const char* anomaly_kind_name(AnomalyKind kind) noexcept {
  switch (kind) {
    case AnomalyKind::Spike: return "spike";
    case AnomalyKind::Flatline: return "flatline";
    case AnomalyKind::FrequencyBurst: return "freqburst";
    case AnomalyKind::NoiseBurst: return "noiseburst";
  }
  return "?";
}

std::vector<TimeSeriesRecord> make_synthetic_suite(const SynthSuiteSpec& spec) {
  const std::size_t margin = spec.window_length / 2;
  if (spec.train_end < spec.window_length ||
      spec.length < spec.train_end + margin + spec.window_length + 200) {
    throw Error(Errc::InvalidArgument,
                "synthetic suite needs train_end >= window length and room for a scorable "
                "anomaly after it");
  }
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<TimeSeriesRecord> suite;
  suite.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ull + i);
    const auto kind = static_cast<AnomalyKind>(i % 4);
    const double period = rng.uniform(40.0, 120.0);
    const double phase = rng.uniform(0.0, two_pi);
    const double harmonic = rng.uniform(0.1, 0.4);

    TimeSeriesRecord r;
    r.values.resize(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
      const double w = two_pi * static_cast<double>(t) / period + phase;
      r.values[t] = std::sin(w) + harmonic * std::sin(2.0 * w) + spec.noise * rng.gaussian();
    }

    const std::size_t extent = kind == AnomalyKind::Spike ? rng.index(1, 3) : rng.index(30, 60);
    const std::size_t begin =
        rng.index(spec.train_end + margin, spec.length - spec.window_length - 100 - extent);
    const std::size_t end = begin + extent - 1;
    switch (kind) {
      case AnomalyKind::Spike: {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double height = rng.uniform(4.0, 6.0);
        for (std::size_t t = begin; t <= end; ++t) r.values[t] += sign * height;
        break;
      }
      case AnomalyKind::Flatline:
        for (std::size_t t = begin; t <= end; ++t) r.values[t] = spec.noise * rng.gaussian();
        break;
      case AnomalyKind::FrequencyBurst:
        for (std::size_t t = begin; t <= end; ++t) {
          const double w = 3.0 * two_pi * static_cast<double>(t) / period + phase;
          r.values[t] = std::sin(w) + spec.noise * rng.gaussian();
        }
        break;
      case AnomalyKind::NoiseBurst:
        for (std::size_t t = begin; t <= end; ++t) r.values[t] += 0.8 * rng.gaussian();
        break;
    }

    char name[64];
    std::snprintf(name, sizeof name, "synth%03zu_%s", i, anomaly_kind_name(kind));
    r.name = name;
    r.train_end = spec.train_end;
    r.anomaly_begin = begin;
    r.anomaly_end = end;
    r.validate();
    suite.push_back(std::move(r));
  }
  return suite;
}

}  // namespace tsad
