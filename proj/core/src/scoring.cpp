#include "tsad/scoring.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "tsad/errors.hpp"

namespace tsad {

const char* distance_kind_name(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::Mahalanobis: return "mahalanobis";
    case DistanceKind::Density: return "density";
  }
  return "?";
}

DistanceKind parse_distance_kind(const std::string& name) {
  if (name == "euclidean") return DistanceKind::Euclidean;
  if (name == "mahalanobis") return DistanceKind::Mahalanobis;
  if (name == "density") return DistanceKind::Density;
  throw Error(Errc::ConfigError,
              "unknown distance '" + name + "' (expected euclidean, mahalanobis or density)");
}

void DistanceSpec::validate() const {
  if (kind == DistanceKind::Density) {
    const std::size_t min_b = include_nearest ? 2 : 1;
    if (neighbors < min_b) {
      throw Error(Errc::InvalidArgument, "density distance needs b >= " + std::to_string(min_b) +
                                             ", got " + std::to_string(neighbors));
    }
  }
  if (kind == DistanceKind::Mahalanobis && !(ridge >= 0.0)) {
    throw Error(Errc::InvalidArgument, "ridge lambda must be >= 0");
  }
}

CovarianceModel::CovarianceModel(Eigen::MatrixXd sigma, double lambda, double ridge)
    : sigma_(std::move(sigma)), llt_(sigma_), lambda_(lambda), ridge_(ridge) {
  if (llt_.info() != Eigen::Success) {
    throw Error(Errc::CovarianceSingular,
                "covariance is not positive definite with ridge lambda = " +
                    std::to_string(lambda) + "; increase the ridge (e.g. ridge=1e-3) or use "
                    "more bank items");
  }
}

double CovarianceModel::mahalanobis(std::span<const float> r, std::span<const float> m) const {
  const auto n = static_cast<Eigen::Index>(dim());
  if (r.size() != dim() || m.size() != dim()) {
    throw Error(Errc::DimensionMismatch, "mahalanobis operands do not match covariance dim " +
                                             std::to_string(dim()));
  }
  Eigen::VectorXd diff(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    diff[i] = static_cast<double>(r[static_cast<std::size_t>(i)]) - m[static_cast<std::size_t>(i)];
  }
  llt_.matrixL().solveInPlace(diff);
  return diff.norm();
}

CovarianceModel fit_covariance(const MemoryBank& bank, double lambda) {
  const std::size_t K = bank.size();
  if (K < 2) {
    throw Error(Errc::CovarianceTooSmall,
                "covariance needs at least 2 bank items, bank has " + std::to_string(K) +
                    "; use a larger coreset or switch to distance=euclidean");
  }
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "ridge lambda must be >= 0");
  const auto d = static_cast<Eigen::Index>(bank.dim());
  Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> items(
      bank.data().data(), static_cast<Eigen::Index>(K), d);
  const Eigen::MatrixXd x = items.cast<double>();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd sigma = (centered.transpose() * centered) / static_cast<double>(K - 1);
  if (!sigma.allFinite()) {
    throw Error(Errc::CovarianceNonFinite, "sample covariance has non-finite entries");
  }
  const double trace = sigma.trace();
  const double ridge = trace > 0.0 ? lambda * trace / static_cast<double>(d) : lambda;
  sigma.diagonal().array() += ridge;
  return CovarianceModel(std::move(sigma), lambda, ridge);
}

double distance_euclidean(std::span<const float> r, std::span<const float> m) {
  if (r.size() != m.size()) {
    throw Error(Errc::DimensionMismatch, "euclidean operands have dimensions " +
                                             std::to_string(r.size()) + " and " +
                                             std::to_string(m.size()));
  }
  return std::sqrt(squared_l2(r, m));
}

double distance_mahalanobis(std::span<const float> r, std::span<const float> m,
                            const CovarianceModel& cov) {
  return cov.mahalanobis(r, m);
}

double density_weight(double nn_distance, std::span<const double> neighborhood_distances,
                      std::size_t d_model, bool include_nearest, bool max_shift) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_model));
  const double nn_scaled = nn_distance * scale;
  double shift = 0.0;
  if (max_shift) {
    shift = include_nearest ? nn_scaled : -std::numeric_limits<double>::infinity();
    for (double dist : neighborhood_distances) shift = std::max(shift, dist * scale);
  }
  double denom = 0.0;
  for (double dist : neighborhood_distances) denom += std::exp(dist * scale - shift);
  return 1.0 - std::exp(nn_scaled - shift) / denom;
}

double distance_density(std::span<const float> r, const MemoryBank& bank, std::size_t b,
                        bool include_nearest) {
  if (bank.empty()) throw Error(Errc::EmptyBank, "density distance on an empty bank");
  const std::size_t needed = include_nearest ? b : b + 1;
  if (needed > bank.size()) {
    throw Error(Errc::NeighborCountExceedsBank, "density neighborhood b = " + std::to_string(b) +
                                                    " needs " + std::to_string(needed) +
                                                    " bank items, bank has " +
                                                    std::to_string(bank.size()));
  }
  const Neighbor nn = nearest_neighbor(bank, r);
  const auto center = bank.item(nn.index);
  const auto hood = k_nearest(bank, center, include_nearest ? b - 1 : b, nn.index);

  std::vector<double> dists;
  dists.reserve(b);
  if (include_nearest) dists.push_back(nn.distance);
  for (const auto& n : hood) dists.push_back(std::sqrt(squared_l2(r, bank.item(n.index))));
  return density_weight(nn.distance, dists, bank.dim(), include_nearest) * nn.distance;
}

ScoreSeries::ScoreSeries(std::size_t begin_time, std::size_t end_time)
    : begin_(begin_time), values_(end_time > begin_time ? end_time - begin_time : 0) {}

void ScoreSeries::set(std::size_t t, double score) {
  if (t < begin_time() || t >= end_time()) {
    throw Error(Errc::InvalidArgument, "time " + std::to_string(t) + " outside score range [" +
                                           std::to_string(begin_time()) + ", " +
                                           std::to_string(end_time()) + ")");
  }
  if (!std::isfinite(score) || score < 0.0) {
    throw Error(Errc::InvalidArgument,
                "score at time " + std::to_string(t) + " is negative or non-finite");
  }
  values_[t - begin_] = score;
}

std::optional<double> ScoreSeries::at(std::size_t t) const {
  if (t < begin_time() || t >= end_time()) return std::nullopt;
  return values_[t - begin_];
}

std::size_t ScoreSeries::defined_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

std::vector<std::pair<std::size_t, double>> ScoreSeries::defined() const {
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i]) out.emplace_back(begin_ + i, *values_[i]);
  }
  return out;
}

ScoreSeries ScoreSeries::widened(std::size_t begin_time, std::size_t end_time) const {
  ScoreSeries out(std::min(begin_time, this->begin_time()), std::max(end_time, this->end_time()));
  out.threshold = threshold;
  for (const auto& [t, s] : defined()) out.values_[t - out.begin_] = s;
  return out;
}

std::vector<std::pair<std::size_t, bool>> apply_threshold(const ScoreSeries& scores,
                                                          double theta) {
  std::vector<std::pair<std::size_t, bool>> out;
  for (const auto& [t, s] : scores.defined()) out.emplace_back(t, s > theta);
  return out;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_scores_csv(std::ostream& out, const ScoreSeries& scores) {
  out << "reference_time,score\n";
  for (const auto& [t, s] : scores.defined()) out << t << ',' << format_real(s) << '\n';
}

ScoreSeries read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "reference_time,score") {
    throw Error(Errc::Io, "score CSV is missing the 'reference_time,score' header");
  }
  std::vector<std::pair<std::size_t, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t t = 0;
    double s = 0.0;
    const char* b = line.data();
    const char* e = line.data() + line.size();
    if (comma == std::string::npos ||
        std::from_chars(b, b + comma, t).ec != std::errc{} ||
        std::from_chars(b + comma + 1, e, s).ec != std::errc{}) {
      throw Error(Errc::Io, "malformed score CSV line '" + line + "'");
    }
    rows.emplace_back(t, s);
  }
  if (rows.empty()) return {};
  std::sort(rows.begin(), rows.end());
  ScoreSeries series(rows.front().first, rows.back().first + 1);
  for (const auto& [t, s] : rows) series.set(t, s);
  return series;
}

ScoreRun score_stream(MemoryBank& bank, const std::optional<NoveltyModel>& novelty,
                      const EmbeddingMatrix& embeddings, const DistanceSpec& dist) {
  dist.validate();
  if (bank.empty()) throw Error(Errc::EmptyBank, "scoring against an empty bank");
  if (embeddings.rows == 0) throw Error(Errc::InvalidArgument, "no embeddings to score");
  embeddings.validate();
  if (embeddings.dim != bank.dim()) {
    throw Error(Errc::DimensionMismatch, "embeddings have dimension " +
                                             std::to_string(embeddings.dim) + ", bank has " +
                                             std::to_string(bank.dim()));
  }

  std::optional<CovarianceModel> cov;
  if (dist.kind == DistanceKind::Mahalanobis) cov = fit_covariance(bank, dist.ridge);

  ScoreRun run;
  run.scores = ScoreSeries(embeddings.reference_times.front(),
                           embeddings.reference_times.back() + 1);
  if (cov) run.ridge = cov->ridge();

  for (std::size_t i = 0; i < embeddings.rows; ++i) {
    const auto r = embeddings.row(i);
    const auto t = embeddings.reference_times[i];
    const Neighbor nn = nearest_neighbor(bank, r);
    double score = nn.distance;
    switch (dist.kind) {
      case DistanceKind::Euclidean:
        break;
      case DistanceKind::Mahalanobis:
        score = cov->mahalanobis(r, bank.item(nn.index));
        break;
      case DistanceKind::Density:
        score = distance_density(r, bank, dist.neighbors, dist.include_nearest);
        break;
    }
    run.scores.set(t, score);
    if (novelty) ttamb_insert(bank, *novelty, r, nn.distance, t, &run.log);
  }
  return run;
}

}  // namespace tsad
