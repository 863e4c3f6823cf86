#include "tsad/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* b = value.data();
  const char* e = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{} || ptr != e) {
    throw Error(Errc::ConfigError, "key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

std::size_t parse_positive(const std::string& key, const std::string& value) {
  const auto v = parse_number<std::size_t>(key, value);
  if (v == 0) throw Error(Errc::ConfigError, "key '" + key + "' must be positive");
  return v;
}

std::optional<std::size_t> parse_limit(const std::string& key, const std::string& value) {
  if (value == "unbounded") return std::nullopt;
  return parse_positive(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw Error(Errc::ConfigError, "key '" + key + "': expected on/off, got '" + value + "'");
}

std::string limit_text(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : "unbounded";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

}  // namespace

void RunConfig::resolve() {
  const std::size_t n = window.window_length / std::max<std::size_t>(window.patch_length, 1);
  if (reference == "center") {
    window.reference_patch = std::max<std::size_t>(1, n / 2);
  } else if (reference == "last") {
    window.reference_patch = n;
  } else {
    window.reference_patch = parse_positive("reference", reference);
  }
  window.validate();
  distance.validate();
  eval.validate();
  if (!(novelty_q > 0.0 && novelty_q <= 100.0)) {
    throw Error(Errc::ConfigError, "novelty_q must lie in (0, 100]");
  }
  if (embedding == EmbeddingSource::Trep && trep_dir.empty()) {
    throw Error(Errc::ConfigError, "embedding=trep requires trep_dir");
  }
  if (workers == 0) workers = 1;
}

std::vector<std::string> config_keys() {
  return {"datasets", "window_length", "patch_length", "stride", "reference", "embedding",
          "trep_dir", "layer", "d_model", "coreset", "seed", "distance", "density_b",
          "density_include_nearest", "ridge", "ttamb", "novelty_q", "capacity", "delta",
          "alphas", "out_dir", "workers"};
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "datasets") {
    c.datasets = split_list(value);
  } else if (key == "window_length") {
    c.window.window_length = parse_positive(key, value);
  } else if (key == "patch_length") {
    c.window.patch_length = parse_positive(key, value);
  } else if (key == "stride") {
    c.window.stride = parse_positive(key, value);
  } else if (key == "reference") {
    if (value != "center" && value != "last") parse_positive(key, value);
    c.reference = value;
  } else if (key == "embedding") {
    if (value == "synthetic") {
      c.embedding = EmbeddingSource::Synthetic;
    } else if (value == "trep") {
      c.embedding = EmbeddingSource::Trep;
    } else {
      throw Error(Errc::ConfigError, "embedding must be synthetic or trep, got '" + value + "'");
    }
  } else if (key == "trep_dir") {
    c.trep_dir = value;
  } else if (key == "layer") {
    c.layer = parse_positive(key, value);
  } else if (key == "d_model") {
    c.d_model = parse_positive(key, value);
  } else if (key == "coreset") {
    c.coreset = parse_limit(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "distance") {
    c.distance.kind = parse_distance_kind(value);
  } else if (key == "density_b") {
    c.distance.neighbors = parse_positive(key, value);
  } else if (key == "density_include_nearest") {
    c.distance.include_nearest = parse_bool(key, value);
  } else if (key == "ridge") {
    c.distance.ridge = parse_number<double>(key, value);
  } else if (key == "ttamb") {
    c.ttamb = parse_bool(key, value);
  } else if (key == "novelty_q") {
    c.novelty_q = parse_number<double>(key, value);
  } else if (key == "capacity") {
    c.capacity = parse_limit(key, value);
  } else if (key == "delta") {
    c.eval.tolerance = parse_number<std::size_t>(key, value);
  } else if (key == "alphas") {
    c.eval.alphas.clear();
    for (const auto& a : split_list(value)) c.eval.alphas.push_back(parse_number<double>(key, a));
  } else if (key == "out_dir") {
    c.out_dir = value;
  } else if (key == "workers") {
    c.workers = parse_positive(key, value);
  } else {
    throw Error(Errc::ConfigError, "unknown configuration key '" + key + "'");
  }
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(Errc::ConfigError, "override '" + assignment + "' is not of the form key=value");
  }
  apply_setting(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::PathNotFound, "config file '" + path.string() + "' not found");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "datasets = " << join(c.datasets) << '\n';
  out << "window_length = " << c.window.window_length << '\n';
  out << "patch_length = " << c.window.patch_length << '\n';
  out << "stride = " << c.window.stride << '\n';
  out << "reference = " << c.reference << '\n';
  out << "embedding = " << (c.embedding == EmbeddingSource::Trep ? "trep" : "synthetic") << '\n';
  out << "trep_dir = " << c.trep_dir.string() << '\n';
  out << "layer = " << c.layer << '\n';
  out << "d_model = " << c.d_model << '\n';
  out << "coreset = " << limit_text(c.coreset) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "distance = " << distance_kind_name(c.distance.kind) << '\n';
  out << "density_b = " << c.distance.neighbors << '\n';
  out << "density_include_nearest = " << (c.distance.include_nearest ? "true" : "false") << '\n';
  out << "ridge = " << format_real(c.distance.ridge) << '\n';
  out << "ttamb = " << (c.ttamb ? "on" : "off") << '\n';
  out << "novelty_q = " << format_real(c.novelty_q) << '\n';
  out << "capacity = " << limit_text(c.capacity) << '\n';
  out << "delta = " << c.eval.tolerance << '\n';
  std::vector<std::string> alphas;
  for (double a : c.eval.alphas) alphas.push_back(format_real(a));
  out << "alphas = " << join(alphas) << '\n';
  out << "out_dir = " << c.out_dir.string() << '\n';
  out << "workers = " << c.workers << '\n';
  return out.str();
}

nlohmann::ordered_json config_echo(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["datasets"] = c.datasets;
  j["window_length"] = c.window.window_length;
  j["patch_length"] = c.window.patch_length;
  j["stride"] = c.window.stride;
  j["reference"] = c.reference;
  j["reference_patch"] = c.window.reference_patch;
  j["embedding"] = c.embedding == EmbeddingSource::Trep ? "trep" : "synthetic";
  j["trep_dir"] = c.trep_dir.string();
  j["layer"] = c.layer;
  j["d_model"] = c.d_model;
  j["coreset"] = limit_text(c.coreset);
  j["seed"] = c.seed;
  j["distance"] = distance_kind_name(c.distance.kind);
  j["density_b"] = c.distance.neighbors;
  j["density_include_nearest"] = c.distance.include_nearest;
  j["ridge"] = c.distance.ridge;
  j["ttamb"] = c.ttamb;
  j["novelty_q"] = c.novelty_q;
  j["capacity"] = limit_text(c.capacity);
  j["delta"] = c.eval.tolerance;
  j["alphas"] = c.eval.alphas;
  return j;
}

void apply_environment(RunConfig& config) {
  if (const char* w = std::getenv("TSAD_WORKERS"); w && *w) {
    config.workers = parse_positive("TSAD_WORKERS", w);
  }
  if (const char* o = std::getenv("TSAD_OUT_DIR"); o && *o) config.out_dir = o;
}

}  // namespace tsad
