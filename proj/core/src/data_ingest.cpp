#include "tsad/data_ingest.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

bool parse_index(std::string_view token, std::size_t& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

bool is_space(char c) {
  return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

struct StartRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

StartRange start_range(const TimeSeriesRecord& record, const WindowSpec& spec, Region region) {
  const std::size_t L = spec.window_length;
  const std::size_t offset = spec.reference_offset();
  StartRange r;
  if (region == Region::Train) {
    if (record.train_end < L) {
      throw Error(Errc::EmptyRegion, "train region of '" + record.name + "' has " +
                                         std::to_string(record.train_end) +
                                         " steps, shorter than window length " +
                                         std::to_string(L));
    }
    r.first = 0;
    r.last = record.train_end - L;
    return r;
  }
  const std::size_t T = record.length();
  if (T < L) {
    throw Error(Errc::EmptyRegion, "test region of '" + record.name + "': series length " +
                                       std::to_string(T) + " is shorter than window length " +
                                       std::to_string(L));
  }
  r.first = record.train_end > offset ? record.train_end - offset : 0;
  r.last = T - L;
  if (r.first > r.last) {
    throw Error(Errc::EmptyRegion, "test region of '" + record.name +
                                       "' admits no window with reference time >= " +
                                       std::to_string(record.train_end));
  }
  return r;
}

}  // namespace

void TimeSeriesRecord::validate() const {
  const std::size_t T = values.size();
  if (train_end == 0 || train_end >= T) {
    throw Error(Errc::RecordInvariant, "'" + name + "': train_end " + std::to_string(train_end) +
                                           " must satisfy 0 < train_end < T = " +
                                           std::to_string(T));
  }
  if (anomaly_begin < train_end) {
    throw Error(Errc::RecordInvariant, "'" + name + "': anomaly begin " +
                                           std::to_string(anomaly_begin) +
                                           " precedes train_end " + std::to_string(train_end));
  }
  if (anomaly_end < anomaly_begin) {
    throw Error(Errc::RecordInvariant, "'" + name + "': anomaly end " +
                                           std::to_string(anomaly_end) + " precedes begin " +
                                           std::to_string(anomaly_begin));
  }
  if (anomaly_end >= T) {
    throw Error(Errc::RecordInvariant, "'" + name + "': anomaly end " +
                                           std::to_string(anomaly_end) +
                                           " lies beyond the series (T = " + std::to_string(T) +
                                           ")");
  }
  for (std::size_t i = 0; i < T; ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::NonFiniteValue,
                  "'" + name + "': non-finite value at index " + std::to_string(i));
    }
  }
}

void WindowSpec::validate() const {
  if (window_length == 0 || stride == 0 || patch_length == 0) {
    throw Error(Errc::InvalidWindowSpec, "window length, stride and patch length must be positive");
  }
  if (window_length % patch_length != 0) {
    throw Error(Errc::InvalidWindowSpec, "window length " + std::to_string(window_length) +
                                             " is not a multiple of patch length " +
                                             std::to_string(patch_length));
  }
  if (reference_patch < 1 || reference_patch > num_patches()) {
    throw Error(Errc::InvalidWindowSpec, "reference patch " + std::to_string(reference_patch) +
                                             " outside [1, " + std::to_string(num_patches()) +
                                             "]");
  }
}

WindowSpec WindowSpec::center(std::size_t window_length, std::size_t patch_length) {
  WindowSpec s;
  s.window_length = window_length;
  s.patch_length = patch_length;
  s.reference_patch = std::max<std::size_t>(1, window_length / patch_length / 2);
  return s;
}

WindowSpec WindowSpec::last(std::size_t window_length, std::size_t patch_length) {
  WindowSpec s;
  s.window_length = window_length;
  s.patch_length = patch_length;
  s.reference_patch = window_length / patch_length;
  return s;
}

const char* region_name(Region region) noexcept {
  return region == Region::Train ? "train" : "test";
}

TimeSeriesRecord parse_ucr_file(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();

  // <name>_<train_end>_<a>_<b>
  std::vector<std::string_view> parts;
  {
    std::string_view rest(stem);
    for (std::size_t us; (us = rest.find('_')) != std::string_view::npos;) {
      parts.push_back(rest.substr(0, us));
      rest.remove_prefix(us + 1);
    }
    parts.push_back(rest);
  }
  std::array<std::size_t, 3> labels{};
  bool ok = parts.size() >= 3;
  for (std::size_t k = 0; ok && k < 3; ++k) {
    ok = parse_index(parts[parts.size() - 3 + k], labels[k]);
  }
  if (!ok) {
    throw Error(Errc::MalformedFilename,
                "'" + path.filename().string() +
                    "' does not end in three integers <train_end>_<anomaly_begin>_<anomaly_end>");
  }
  std::string name;
  for (std::size_t k = 0; k + 3 < parts.size(); ++k) {
    if (k > 0) name += '_';
    name += parts[k];
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::PathNotFound, "cannot open '" + path.string() + "'");
  }
  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  TimeSeriesRecord record;
  record.name = name.empty() ? stem : name;
  record.train_end = labels[0];
  record.anomaly_begin = labels[1];
  record.anomaly_end = labels[2];
  record.source = path;

  const char* p = body.data();
  const char* const last = body.data() + body.size();
  while (p < last) {
    while (p < last && is_space(*p)) ++p;
    if (p == last) break;
    const char* tok_end = p;
    while (tok_end < last && !is_space(*tok_end)) ++tok_end;
    double v = 0.0;
    const char* start = (*p == '+') ? p + 1 : p;
    auto [ptr, ec] = std::from_chars(start, tok_end, v);
    if (ec != std::errc{} || ptr != tok_end) {
      throw Error(Errc::NonNumericToken, "'" + path.filename().string() + "': token '" +
                                             std::string(p, tok_end) + "' at value index " +
                                             std::to_string(record.values.size()));
    }
    record.values.push_back(v);
    p = tok_end;
  }

  record.validate();
  return record;
}

std::filesystem::path write_ucr_file(const TimeSeriesRecord& record,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (record.name + "_" + std::to_string(record.train_end) + "_" +
                           std::to_string(record.anomaly_begin) + "_" +
                           std::to_string(record.anomaly_end) + ".txt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  std::array<char, 64> buf{};
  for (double v : record.values) {
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), ptr - buf.data());
    out.put('\n');
  }
  if (!out) throw Error(Errc::Io, "short write to '" + path.string() + "'");
  return path;
}

std::vector<Window> generate_windows(const TimeSeriesRecord& record, const WindowSpec& spec,
                                     Region region) {
  spec.validate();
  const StartRange range = start_range(record, spec, region);
  std::vector<Window> windows;
  windows.reserve((range.last - range.first) / spec.stride + 1);
  const std::span<const double> all(record.values);
  for (std::size_t start = range.first; start <= range.last; start += spec.stride) {
    windows.push_back(Window{start + spec.reference_offset(), start,
                             all.subspan(start, spec.window_length)});
  }
  return windows;
}

std::size_t count_windows(const TimeSeriesRecord& record, const WindowSpec& spec,
                          Region region) {
  spec.validate();
  const StartRange range = start_range(record, spec, region);
  return (range.last - range.first) / spec.stride + 1;
}

std::string record_manifest_json(const TimeSeriesRecord& record) {
  nlohmann::ordered_json j;
  j["name"] = record.name;
  j["T"] = record.length();
  j["train_end"] = record.train_end;
  j["a"] = record.anomaly_begin;
  j["b"] = record.anomaly_end;
  j["source"] = record.source.string();
  return j.dump();
}

}  // namespace tsad
