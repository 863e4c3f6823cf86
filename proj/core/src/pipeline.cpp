#include "tsad/pipeline.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "tsad/errors.hpp"
#include "tsad/synth.hpp"
#include "tsad/trep.hpp"

namespace tsad {

namespace fs = std::filesystem;

namespace {

RunConfig resolved(const RunConfig& config) {
  RunConfig c = config;
  c.resolve();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::Io, "short write to '" + path.string() + "'");
}

std::string describe(const std::exception& e) { return e.what(); }

/// Runs `fn(i)` for every index on `workers` threads. Per-item failures are
/// captured in order; results stay index-aligned.
std::vector<std::optional<std::string>> parallel_for(std::size_t n, std::size_t workers,
                                                     const std::function<void(std::size_t)>& fn) {
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = describe(e);
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return errors;
}

std::string dataset_label(const fs::path& path) {
  try {
    return parse_ucr_file(path).name;
  } catch (const std::exception&) {
    return path.stem().string();
  }
}

nlohmann::ordered_json score_report_json(const TimeSeriesRecord& record, const DatasetRun& run,
                                         const BankArtifact& artifact, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["dataset"] = record.name;
  j["distance"] = distance_kind_name(config.distance.kind);
  j["ridge_lambda"] = config.distance.ridge;
  j["ridge_applied"] = run.score.ridge ? nlohmann::ordered_json(*run.score.ridge)
                                       : nlohmann::ordered_json(nullptr);
  j["density_b"] = config.distance.neighbors;
  j["density_include_nearest"] = config.distance.include_nearest;
  j["ttamb"] = config.ttamb;
  j["novelty"] = {{"q", artifact.novelty.percentile}, {"tau", artifact.novelty.threshold}};
  j["insertion_count"] = run.score.log.inserted();
  j["capacity_events"] = run.score.log.capacity_events();
  j["bank_size_initial"] = artifact.bank.size();
  j["bank_size_final"] = artifact.bank.size() + run.score.log.inserted();
  j["scored_steps"] = run.score.scores.defined_count();
  j["top1"] = {{"argmax_time", run.result.argmax_time}, {"hit", run.result.top1_hit}};
  j["config_echo"] = config_echo(config);
  return j;
}

void write_score_outputs(const fs::path& dir, const TimeSeriesRecord& record,
                         const DatasetRun& run, const BankArtifact& artifact,
                         const RunConfig& config) {
  fs::create_directories(dir);
  std::ostringstream csv;
  write_scores_csv(csv, run.score.scores);
  write_text(dir / "scores.csv", csv.str());
  write_text(dir / "score_report.json",
             score_report_json(record, run, artifact, config).dump(2) + "\n");
}

}  // namespace

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t dataset_seed(std::uint64_t master_seed, std::string_view dataset_name) noexcept {
  return master_seed ^ stable_hash(dataset_name);
}

std::vector<fs::path> resolve_datasets(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& pattern : patterns) {
    if (pattern.find_first_of("*?[") != std::string::npos) {
      glob_t g{};
      if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) {
          if (fs::is_regular_file(g.gl_pathv[i])) found.insert(g.gl_pathv[i]);
        }
      }
      globfree(&g);
    } else if (fs::is_directory(pattern)) {
      for (const auto& entry : fs::directory_iterator(pattern)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
          found.insert(entry.path());
        }
      }
    } else if (fs::is_regular_file(pattern)) {
      found.insert(pattern);
    } else {
      throw Error(Errc::PathNotFound, "dataset path '" + pattern + "' does not exist");
    }
  }
  if (found.empty()) throw Error(Errc::PathNotFound, "dataset list matched no files");
  return {found.begin(), found.end()};
}

fs::path trep_input_path(const fs::path& trep_dir, const std::string& dataset, std::size_t layer,
                         std::size_t reference_patch, Region region) {
  return trep_dir / dataset /
         ("layer" + std::to_string(layer) + "_patch" + std::to_string(reference_patch) + "_" +
          region_name(region) + ".trep");
}

EmbeddingMatrix region_embeddings(const TimeSeriesRecord& record, const RunConfig& config,
                                  Region region, EmbeddingConfig* used) {
  const auto windows = generate_windows(record, config.window, region);
  EmbeddingConfig emb;
  emb.layer = config.layer;
  emb.spec = config.window;

  if (config.embedding == EmbeddingSource::Synthetic) {
    emb.d_model = config.d_model;
    SyntheticProvider provider(dataset_seed(config.seed, record.name), config.d_model,
                               config.window.patch_length);
    emb.provider_id = provider.id();
    if (used) *used = emb;
    return embed(provider, windows, emb);
  }

  const auto path = trep_input_path(config.trep_dir, record.name, config.layer,
                                    config.window.reference_patch, region);
  if (!fs::exists(path)) {
    throw Error(Errc::MissingArtifact, "embedding file '" + path.string() + "' not found");
  }
  auto [matrix, file_cfg] = read_trep(path);
  if (file_cfg.layer != config.layer || file_cfg.spec.reference_patch != config.window.reference_patch) {
    throw Error(Errc::InvalidMatrix, "'" + path.string() + "' holds layer " +
                                         std::to_string(file_cfg.layer) + ", patch " +
                                         std::to_string(file_cfg.spec.reference_patch) +
                                         "; expected layer " + std::to_string(config.layer) +
                                         ", patch " +
                                         std::to_string(config.window.reference_patch));
  }
  if (matrix.rows != windows.size()) {
    throw Error(Errc::InvalidMatrix, "'" + path.string() + "' has " + std::to_string(matrix.rows) +
                                         " rows but the " + region_name(region) +
                                         " region has " + std::to_string(windows.size()) +
                                         " windows");
  }
  emb.d_model = matrix.dim;
  emb.provider_id = file_cfg.provider_id.empty() ? "trep" : file_cfg.provider_id;
  if (used) *used = emb;
  MatrixProvider provider(std::move(matrix), emb.provider_id);
  return embed(provider, windows, emb);
}

BankArtifact build_memory(const TimeSeriesRecord& record, const RunConfig& config) {
  BankArtifact a;
  const auto train = region_embeddings(record, config, Region::Train, &a.embedding);
  MemoryBank full = build_bank(train);
  a.original_size = full.size();
  a.seed = dataset_seed(config.seed, record.name);
  if (config.coreset && full.size() > *config.coreset) {
    a.start_index = kcenter_start_index(full.size(), a.seed);
    a.bank = kcenter_coreset(full, *config.coreset, a.seed);
  } else {
    a.bank = std::move(full);
  }
  a.novelty = fit_novelty(a.bank, train, config.novelty_q);
  if (config.capacity) {
    if (a.bank.size() > *config.capacity) {
      throw Error(Errc::ConfigError, "capacity " + std::to_string(*config.capacity) +
                                         " is below the initial bank size " +
                                         std::to_string(a.bank.size()));
    }
    a.bank.set_capacity_limit(config.capacity);
  }
  return a;
}

void write_bank_artifact(const fs::path& trep_path, const std::string& dataset,
                         const BankArtifact& a, const RunConfig& config) {
  write_trep(a.bank.to_matrix(), a.embedding, trep_path);

  TrepSidecar side;
  side.provider_id = a.embedding.provider_id;
  side.dataset = dataset;
  side.spec = a.embedding.spec;
  side.layer = a.embedding.layer;
  side.d_model = a.embedding.d_model;
  // ordered_json is vector-backed: fill locally, then insert.
  auto provenance = nlohmann::ordered_json::array();
  auto sources = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < a.bank.size(); ++i) {
    const auto& info = a.bank.info(i);
    provenance.push_back(provenance_name(info.provenance));
    sources.push_back(info.source_index ? nlohmann::ordered_json(*info.source_index)
                                        : nlohmann::ordered_json(nullptr));
  }
  side.extra["provenance"] = std::move(provenance);
  side.extra["source_index"] = std::move(sources);
  side.extra["novelty"] = {{"q", a.novelty.percentile}, {"tau", a.novelty.threshold}};
  side.extra["coreset"] = {
      {"max_size", config.coreset ? nlohmann::ordered_json(*config.coreset)
                                  : nlohmann::ordered_json("unbounded")},
      {"original_size", a.original_size},
      {"size", a.bank.size()},
      {"reduction_ratio", reduction_ratio(a.bank.size(), a.original_size)},
      {"seed", a.seed},
      {"start_index", a.start_index},
  };
  side.extra["capacity"] = a.bank.capacity_limit()
                               ? nlohmann::ordered_json(*a.bank.capacity_limit())
                               : nlohmann::ordered_json("unbounded");
  side.extra["config_echo"] = config_echo(config);
  write_sidecar(trep_path, side);
}

BankArtifact read_bank_artifact(const fs::path& trep_path) {
  if (!fs::exists(trep_path)) {
    throw Error(Errc::MissingArtifact, "bank artifact '" + trep_path.string() +
                                           "' not found; run build-memory first");
  }
  auto [matrix, emb] = read_trep(trep_path);
  const auto side = read_sidecar(trep_path);
  if (!side) {
    throw Error(Errc::MissingArtifact,
                "bank sidecar '" + sidecar_path(trep_path).string() + "' not found");
  }
  const auto& extra = side->extra;
  const auto& provenance = extra.at("provenance");
  const auto& sources = extra.at("source_index");
  if (provenance.size() != matrix.rows || sources.size() != matrix.rows) {
    throw Error(Errc::InvalidMatrix, "bank sidecar provenance does not match " +
                                         std::to_string(matrix.rows) + " rows");
  }

  BankArtifact a;
  a.embedding = emb;
  a.embedding.d_model = matrix.dim;
  a.bank = MemoryBank(matrix.dim);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    BankItemInfo info;
    info.provenance = provenance[i] == "adapted" ? Provenance::Adapted : Provenance::Train;
    if (!sources[i].is_null()) info.source_index = sources[i].get<std::size_t>();
    info.reference_time = matrix.reference_times[i];
    a.bank.append(matrix.row(i), info);
  }
  a.novelty.percentile = extra.at("novelty").at("q").get<double>();
  a.novelty.threshold = extra.at("novelty").at("tau").get<double>();
  const auto& core = extra.at("coreset");
  a.original_size = core.at("original_size").get<std::size_t>();
  a.seed = core.at("seed").get<std::uint64_t>();
  a.start_index = core.at("start_index").get<std::size_t>();
  if (extra.contains("capacity") && extra.at("capacity").is_number_unsigned()) {
    a.bank.set_capacity_limit(extra.at("capacity").get<std::size_t>());
  }
  return a;
}

DatasetRun score_and_evaluate(const TimeSeriesRecord& record, const BankArtifact& artifact,
                              const RunConfig& config) {
  EmbeddingConfig used;
  const auto test = region_embeddings(record, config, Region::Test, &used);
  if (used.d_model != artifact.bank.dim()) {
    throw Error(Errc::DimensionMismatch, "test embeddings have dimension " +
                                             std::to_string(used.d_model) + ", bank has " +
                                             std::to_string(artifact.bank.dim()));
  }
  MemoryBank bank = artifact.bank;
  std::optional<NoveltyModel> novelty;
  if (config.ttamb) novelty = artifact.novelty;

  DatasetRun run;
  run.novelty = artifact.novelty;
  run.score = score_stream(bank, novelty, test, config.distance);
  run.score.scores = run.score.scores.widened(record.train_end, record.length());

  const auto t1 = top1(run.score.scores, record, config.eval.tolerance);
  auto& r = run.result;
  r.name = record.name;
  r.top1_hit = t1.hit;
  r.argmax_time = t1.argmax_time;
  for (double alpha : config.eval.alphas) {
    r.alpha_hits[alpha] = alpha_quantile(run.score.scores, record, alpha, config.eval.tolerance);
  }
  r.bank_size = artifact.original_size;
  r.coreset_size = artifact.bank.size();
  r.reduction_ratio = reduction_ratio(artifact.bank.size(), artifact.original_size);
  r.insertion_count = run.score.log.inserted();
  return run;
}

DatasetRun run_dataset(const TimeSeriesRecord& record, const RunConfig& config) {
  return score_and_evaluate(record, build_memory(record, config), config);
}

CommandOutcome cmd_build_memory(const RunConfig& config) {
  const RunConfig c = resolved(config);
  const auto paths = resolve_datasets(c.datasets);
  std::vector<std::string> names(paths.size());
  const auto errors = parallel_for(paths.size(), c.workers, [&](std::size_t i) {
    const auto record = parse_ucr_file(paths[i]);
    names[i] = record.name;
    const auto artifact = build_memory(record, c);
    write_bank_artifact(c.out_dir / record.name / "bank.trep", record.name, artifact, c);
  });
  CommandOutcome out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (errors[i]) {
      out.failed.push_back({names[i].empty() ? dataset_label(paths[i]) : names[i], *errors[i]});
    } else {
      out.succeeded.push_back(names[i]);
    }
  }
  return out;
}

CommandOutcome cmd_score(const RunConfig& config) {
  const RunConfig c = resolved(config);
  const auto paths = resolve_datasets(c.datasets);
  std::vector<std::string> names(paths.size());
  const auto errors = parallel_for(paths.size(), c.workers, [&](std::size_t i) {
    const auto record = parse_ucr_file(paths[i]);
    names[i] = record.name;
    const auto dir = c.out_dir / record.name;
    const auto artifact = read_bank_artifact(dir / "bank.trep");
    if (artifact.embedding.spec.reference_patch != c.window.reference_patch) {
      throw Error(Errc::ConfigError, "bank for '" + record.name + "' was built with reference patch " +
                                         std::to_string(artifact.embedding.spec.reference_patch) +
                                         ", config asks for " +
                                         std::to_string(c.window.reference_patch));
    }
    const auto run = score_and_evaluate(record, artifact, c);
    write_score_outputs(dir, record, run, artifact, c);
  });
  CommandOutcome out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (errors[i]) {
      out.failed.push_back({names[i].empty() ? dataset_label(paths[i]) : names[i], *errors[i]});
    } else {
      out.succeeded.push_back(names[i]);
    }
  }
  return out;
}

EvalOutcome cmd_eval(const RunConfig& config) {
  const RunConfig c = resolved(config);
  const auto paths = resolve_datasets(c.datasets);
  std::vector<std::optional<DatasetResult>> results(paths.size());
  std::vector<std::string> names(paths.size());
  const auto errors = parallel_for(paths.size(), c.workers, [&](std::size_t i) {
    const auto record = parse_ucr_file(paths[i]);
    names[i] = record.name;
    const auto artifact = build_memory(record, c);
    const auto run = score_and_evaluate(record, artifact, c);
    write_score_outputs(c.out_dir / record.name, record, run, artifact, c);
    results[i] = run.result;
  });

  std::vector<DatasetResult> ok;
  std::vector<FailedDataset> failed;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (results[i]) {
      ok.push_back(*results[i]);
    } else {
      failed.push_back({names[i].empty() ? dataset_label(paths[i]) : names[i],
                        errors[i].value_or("unknown failure")});
    }
  }
  EvalOutcome out;
  if (!ok.empty()) out.report = aggregate(ok);
  out.report.failed = std::move(failed);
  out.report.config_echo = config_echo(c);
  write_text(c.out_dir / "report.json", report_to_json(out.report).dump(2) + "\n");
  write_text(c.out_dir / "report.txt", report_table(out.report));
  return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "layer") return SweepAxis::Layer;
  if (name == "reference_patch") return SweepAxis::ReferencePatch;
  if (name == "coreset_size") return SweepAxis::CoresetSize;
  if (name == "distance") return SweepAxis::Distance;
  throw Error(Errc::ConfigError, "unknown sweep axis '" + name +
                                     "' (expected layer, reference_patch, coreset_size, distance)");
}

const char* sweep_axis_name(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::Layer: return "layer";
    case SweepAxis::ReferencePatch: return "reference_patch";
    case SweepAxis::CoresetSize: return "coreset_size";
    case SweepAxis::Distance: return "distance";
  }
  return "?";
}

RunConfig with_sweep_value(const RunConfig& config, SweepAxis axis, const std::string& value) {
  RunConfig c = config;
  switch (axis) {
    case SweepAxis::Layer: apply_setting(c, "layer", value); break;
    case SweepAxis::ReferencePatch: apply_setting(c, "reference", value); break;
    case SweepAxis::CoresetSize: apply_setting(c, "coreset", value); break;
    case SweepAxis::Distance: apply_setting(c, "distance", value); break;
  }
  c.out_dir = config.out_dir / (std::string("sweep_") + sweep_axis_name(axis)) / value;
  c.resolve();
  return c;
}

std::vector<SweepPoint> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                  const std::vector<std::string>& values) {
  if (values.empty()) throw Error(Errc::ConfigError, "sweep needs at least one value");
  std::vector<RunConfig> configs;
  configs.reserve(values.size());
  for (const auto& v : values) configs.push_back(with_sweep_value(config, axis, v));

  if (config.embedding == EmbeddingSource::Trep) {
    const auto paths = resolve_datasets(config.datasets);
    std::vector<std::string> missing;
    for (const auto& path : paths) {
      const auto record = parse_ucr_file(path);
      for (const auto& c : configs) {
        for (Region region : {Region::Train, Region::Test}) {
          const auto p = trep_input_path(c.trep_dir, record.name, c.layer,
                                         c.window.reference_patch, region);
          if (!fs::exists(p)) missing.push_back(p.string());
        }
      }
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += "\n  " + m;
      throw Error(Errc::MissingArtifact, std::to_string(missing.size()) +
                                             " embedding file(s) required by the sweep are "
                                             "missing:" + list);
    }
  }

  std::vector<SweepPoint> points;
  std::string csv = "value,top1\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto outcome = cmd_eval(configs[i]);
    csv += values[i] + "," + format_real(outcome.report.top1_accuracy_pct) + "\n";
    points.push_back({values[i], std::move(outcome.report)});
  }
  write_text(config.out_dir / (std::string("sweep_") + sweep_axis_name(axis) + ".csv"), csv);
  return points;
}

std::vector<fs::path> cmd_synth_data(const fs::path& dir, std::size_t count, std::size_t length,
                                     std::size_t train_end, std::uint64_t seed) {
  SynthSuiteSpec spec;
  spec.count = count;
  spec.length = length;
  spec.train_end = train_end;
  spec.seed = seed;
  std::vector<fs::path> written;
  for (const auto& record : make_synthetic_suite(spec)) written.push_back(write_ucr_file(record, dir));
  return written;
}

}  // namespace tsad
