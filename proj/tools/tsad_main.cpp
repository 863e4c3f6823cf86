// tsad: command-line front end for the memory-bank anomaly detector.
//
//   tsad synth-data   --out DIR [--count 20 --length 4000 --train-end 2000 --seed 7]
//   tsad build-memory [--config FILE] [flags] [--set key=value ...]
//   tsad score        [--config FILE] [flags] [--set key=value ...]
//   tsad eval         [--config FILE] [flags] [--set key=value ...]
//   tsad sweep        --axis AXIS --values V1,V2,... [--config FILE] [flags]
//
// Precedence: config file < TSAD_WORKERS/TSAD_OUT_DIR < flags < --set.
// Exit status: 0 success, 1 at least one dataset failed (partial results are
// written), 2 configuration or fatal error.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsad/config.hpp"
#include "tsad/errors.hpp"
#include "tsad/pipeline.hpp"

namespace {

struct RunFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // config key -> raw value
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config_file, "flat key=value configuration file");
  cmd->add_option("--set", flags.sets, "override, key=value (repeatable)");
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag kFlags[] = {
      {"--datasets", "datasets", "comma-separated files, directories or globs"},
      {"--window-length", "window_length", "window length L"},
      {"--patch-length", "patch_length", "patch length P"},
      {"--stride", "stride", "window stride"},
      {"--reference", "reference", "center | last | patch index"},
      {"--embedding", "embedding", "synthetic | trep"},
      {"--trep-dir", "trep_dir", "root of exported embedding files"},
      {"--layer", "layer", "layer index"},
      {"--d-model", "d_model", "synthetic embedding width"},
      {"--coreset", "coreset", "unbounded | max coreset size"},
      {"--seed", "seed", "master seed"},
      {"--distance", "distance", "euclidean | mahalanobis | density"},
      {"--density-b", "density_b", "density neighbourhood size"},
      {"--ridge", "ridge", "mahalanobis ridge lambda"},
      {"--ttamb", "ttamb", "on | off"},
      {"--novelty-q", "novelty_q", "novelty percentile"},
      {"--capacity", "capacity", "unbounded | bank capacity under adaptation"},
      {"--delta", "delta", "Top-1 tolerance"},
      {"--alphas", "alphas", "comma-separated alpha levels"},
      {"--out", "out_dir", "output directory"},
      {"--workers", "workers", "dataset-level worker threads"},
  };
  for (const auto& f : kFlags) {
    cmd->add_option_function<std::string>(
        f.name, [&flags, key = std::string(f.key)](const std::string& v) { flags.values[key] = v; },
        f.help);
  }
}

tsad::RunConfig build_config(const RunFlags& flags) {
  tsad::RunConfig config;
  if (!flags.config_file.empty()) config = tsad::load_config_file(flags.config_file);
  tsad::apply_environment(config);
  for (const auto& [key, value] : flags.values) tsad::apply_setting(config, key, value);
  for (const auto& s : flags.sets) tsad::apply_override(config, s);
  return config;
}

int report_outcome(const tsad::CommandOutcome& outcome, const char* verb) {
  for (const auto& name : outcome.succeeded) std::cout << verb << ' ' << name << '\n';
  for (const auto& f : outcome.failed) std::cerr << "FAILED " << f.name << ": " << f.error << '\n';
  return outcome.ok() ? 0 : 1;
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-bank time-series anomaly detection"};
  app.require_subcommand(1);

  RunFlags build_flags, score_flags, eval_flags, sweep_flags;
  auto* build = app.add_subcommand("build-memory", "build coreset memory banks and novelty thresholds");
  add_run_flags(build, build_flags);
  auto* score = app.add_subcommand("score", "score test regions against stored banks");
  add_run_flags(score, score_flags);
  auto* eval = app.add_subcommand("eval", "run the full pipeline and aggregate Top-1 / alpha metrics");
  add_run_flags(eval, eval_flags);
  auto* sweep = app.add_subcommand("sweep", "repeat eval over one configuration axis");
  add_run_flags(sweep, sweep_flags);
  std::string axis, values;
  sweep->add_option("--axis", axis, "layer | reference_patch | coreset_size | distance")->required();
  sweep->add_option("--values", values, "comma-separated axis values")->required();

  auto* synth = app.add_subcommand("synth-data", "write the synthetic anomaly suite as UCR files");
  std::string synth_out;
  std::size_t count = 20, length = 4000, train_end = 2000;
  std::uint64_t seed = 7;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--count", count, "number of series");
  synth->add_option("--length", length, "series length T");
  synth->add_option("--train-end", train_end, "exclusive end of the training region");
  synth->add_option("--seed", seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      for (const auto& p : tsad::cmd_synth_data(synth_out, count, length, train_end, seed)) {
        std::cout << p.string() << '\n';
      }
      return 0;
    }
    if (*build) return report_outcome(tsad::cmd_build_memory(build_config(build_flags)), "built");
    if (*score) return report_outcome(tsad::cmd_score(build_config(score_flags)), "scored");
    if (*eval) {
      const auto config = build_config(eval_flags);
      const auto outcome = tsad::cmd_eval(config);
      std::cout << tsad::report_table(outcome.report);
      return outcome.ok() ? 0 : 1;
    }
    if (*sweep) {
      const auto config = build_config(sweep_flags);
      const auto points =
          tsad::cmd_sweep(config, tsad::parse_sweep_axis(axis), split_values(values));
      bool ok = true;
      for (const auto& p : points) {
        std::cout << axis << '=' << p.value << "  top1=" << p.report.top1_accuracy_pct << "%  ("
                  << p.report.hits << '/' << p.report.per_dataset.size() << ")\n";
        for (const auto& f : p.report.failed) {
          std::cerr << "FAILED [" << p.value << "] " << f.name << ": " << f.error << '\n';
          ok = false;
        }
      }
      return ok ? 0 : 1;
    }
  } catch (const tsad::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
