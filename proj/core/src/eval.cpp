#include "tsad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

bool in_padded_interval(std::size_t t, const TimeSeriesRecord& record, std::size_t delta) {
  return t + delta >= record.anomaly_begin && t <= record.anomaly_end + delta;
}

std::vector<std::pair<std::size_t, double>> test_scores(const ScoreSeries& scores,
                                                        const TimeSeriesRecord& record) {
  auto all = scores.defined();
  std::erase_if(all, [&](const auto& e) { return e.first < record.train_end; });
  if (all.empty()) {
    throw Error(Errc::NoDefinedScores,
                "'" + record.name + "' has no defined scores in the test region");
  }
  return all;
}

}  // namespace

void EvalConfig::validate() const {
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw Error(Errc::ConfigError, "alpha must lie in (0, 1], got " + format_real(a));
    }
  }
}

Top1Result top1(const ScoreSeries& scores, const TimeSeriesRecord& record, std::size_t delta) {
  const auto entries = test_scores(scores, record);
  auto best = entries.front();
  for (const auto& e : entries) {
    if (e.second > best.second) best = e;
  }
  return {best.first, in_padded_interval(best.first, record, delta)};
}

bool alpha_quantile(const ScoreSeries& scores, const TimeSeriesRecord& record, double alpha,
                    std::size_t delta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1]");
  }
  auto entries = test_scores(scores, record);
  const double n = static_cast<double>(entries.size());
  auto k = static_cast<std::size_t>(std::ceil(alpha * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                    entries.end(), [](const auto& x, const auto& y) {
                      return x.second > y.second || (x.second == y.second && x.first < y.first);
                    });
  return std::any_of(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                     [&](const auto& e) { return in_padded_interval(e.first, record, delta); });
}

std::string alpha_key(double alpha) {
  std::string s = format_real(alpha);
  const auto dot = s.find('.');
  if (dot == std::string::npos) return s + ".00";
  while (s.size() - dot - 1 < 2) s += '0';
  return s;
}

double reduction_ratio(std::size_t coreset_size, std::size_t original_size) {
  if (original_size == 0) return 0.0;
  return 1.0 - static_cast<double>(coreset_size) / static_cast<double>(original_size);
}

Report aggregate(std::span<const DatasetResult> results) {
  if (results.empty()) throw Error(Errc::EmptyResults, "nothing to aggregate");
  Report r;
  r.per_dataset.assign(results.begin(), results.end());
  std::sort(r.per_dataset.begin(), r.per_dataset.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  double ratio_sum = 0.0;
  for (const auto& d : r.per_dataset) {
    if (d.top1_hit) ++r.hits;
    ratio_sum += d.reduction_ratio;
    for (const auto& [alpha, hit] : d.alpha_hits) {
      auto& count = r.alpha_counts[alpha];
      if (hit) ++count;
    }
  }
  const double n = static_cast<double>(r.per_dataset.size());
  r.top1_accuracy_pct = 100.0 * static_cast<double>(r.hits) / n;
  r.mean_reduction_ratio = ratio_sum / n;
  return r;
}

nlohmann::ordered_json report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["top1_accuracy_pct"] = report.top1_accuracy_pct;
  j["hits"] = report.hits;
  j["datasets"] = report.per_dataset.size();
  auto& rows = j["per_dataset"] = nlohmann::ordered_json::array();
  for (const auto& d : report.per_dataset) {
    nlohmann::ordered_json row;
    row["name"] = d.name;
    row["top1_hit"] = d.top1_hit;
    row["argmax_time"] = d.argmax_time;
    auto& hits = row["alpha_hits"] = nlohmann::ordered_json::object();
    for (const auto& [alpha, hit] : d.alpha_hits) hits[alpha_key(alpha)] = hit;
    row["reduction_ratio"] = d.reduction_ratio;
    row["bank_size"] = d.bank_size;
    row["coreset_size"] = d.coreset_size;
    row["insertion_count"] = d.insertion_count;
    rows.push_back(std::move(row));
  }
  auto& counts = j["alpha_counts"] = nlohmann::ordered_json::object();
  for (const auto& [alpha, count] : report.alpha_counts) counts[alpha_key(alpha)] = count;
  j["mean_reduction_ratio"] = report.mean_reduction_ratio;
  auto& failed = j["failed"] = nlohmann::ordered_json::array();
  for (const auto& f : report.failed) failed.push_back({{"name", f.name}, {"error", f.error}});
  j["config_echo"] = report.config_echo;
  return j;
}

std::string report_table(const Report& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %6s %10s %8s %8s %9s\n", "dataset", "top1", "argmax",
                "reduct", "inserts", "alpha");
  out << line;
  for (const auto& d : report.per_dataset) {
    std::string alphas;
    for (const auto& [alpha, hit] : d.alpha_hits) {
      if (!alphas.empty()) alphas += ' ';
      alphas += alpha_key(alpha) + (hit ? ":y" : ":n");
    }
    std::snprintf(line, sizeof line, "%-40s %6s %10zu %8.4f %8zu %s\n", d.name.c_str(),
                  d.top1_hit ? "hit" : "miss", d.argmax_time, d.reduction_ratio,
                  d.insertion_count, alphas.c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "Top-1 accuracy: %.1f%% (%zu/%zu)\n", report.top1_accuracy_pct,
                report.hits, report.per_dataset.size());
  out << line;
  for (const auto& [alpha, count] : report.alpha_counts) {
    out << "alpha " << alpha_key(alpha) << ": " << count << " datasets detected\n";
  }
  std::snprintf(line, sizeof line, "mean reduction ratio: %.4f\n", report.mean_reduction_ratio);
  out << line;
  for (const auto& f : report.failed) out << "FAILED " << f.name << ": " << f.error << '\n';
  return out.str();
}

}  // namespace tsad
