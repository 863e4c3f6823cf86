#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tsad {

/// One univariate series from a UCR-style archive. Indices are 0-based;
/// `train_end` is exclusive and the anomaly interval [anomaly_begin,
/// anomaly_end] is inclusive.
struct TimeSeriesRecord {
  std::string name;
  std::vector<double> values;
  std::size_t train_end = 0;
  std::size_t anomaly_begin = 0;
  std::size_t anomaly_end = 0;
  std::filesystem::path source;

  std::size_t length() const noexcept { return values.size(); }
  bool is_anomalous(std::size_t t) const noexcept {
    return anomaly_begin <= t && t <= anomaly_end;
  }

  /// Throws Errc::RecordInvariant or Errc::NonFiniteValue.
  void validate() const;
};

struct WindowSpec {
  std::size_t window_length = 512;
  std::size_t stride = 1;
  std::size_t patch_length = 8;
  std::size_t reference_patch = 32;  // 1-based patch index

  std::size_t num_patches() const noexcept { return window_length / patch_length; }
  /// Offset of the reference time step from the window start.
  std::size_t reference_offset() const noexcept {
    return reference_patch * patch_length - 1;
  }

  void validate() const;

  static WindowSpec center(std::size_t window_length = 512, std::size_t patch_length = 8);
  static WindowSpec last(std::size_t window_length = 512, std::size_t patch_length = 8);
};

/// A view into a record. The record must outlive every Window built from it.
struct Window {
  std::size_t reference_time = 0;
  std::size_t window_start = 0;
  std::span<const double> values;
};

enum class Region { Train, Test };

const char* region_name(Region region) noexcept;

TimeSeriesRecord parse_ucr_file(const std::filesystem::path& path);

/// Writes `<dir>/<name>_<train_end>_<a>_<b>.txt` with one value per line
/// using shortest round-trip formatting. Returns the written path.
std::filesystem::path write_ucr_file(const TimeSeriesRecord& record,
                                     const std::filesystem::path& dir);

/// Train windows lie entirely inside [0, train_end). Test windows are every
/// placement whose reference time is at or after train_end; they may reach
/// back into the training region.
std::vector<Window> generate_windows(const TimeSeriesRecord& record, const WindowSpec& spec,
                                     Region region);

/// Number of windows generate_windows would emit, without materializing them.
std::size_t count_windows(const TimeSeriesRecord& record, const WindowSpec& spec,
                          Region region);

/// JSON manifest entry (name, T, train_end, a, b, source path) for pipeline
/// bookkeeping.
std::string record_manifest_json(const TimeSeriesRecord& record);

}  // namespace tsad
