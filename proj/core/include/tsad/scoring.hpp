#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tsad/membank.hpp"

namespace tsad {

enum class DistanceKind { Euclidean, Mahalanobis, Density };

const char* distance_kind_name(DistanceKind kind) noexcept;
DistanceKind parse_distance_kind(const std::string& name);

struct DistanceSpec {
  DistanceKind kind = DistanceKind::Euclidean;
  std::size_t neighbors = 5;  // b, density only
  double ridge = 1e-3;        // lambda, mahalanobis only
  /// Whether the density neighborhood of m* contains m* itself. Turning this
  /// off relaxes the bound to b >= 1.
  bool include_nearest = true;

  void validate() const;
};

/// Ridge-regularized covariance of the bank items, held as a Cholesky factor.
class CovarianceModel {
 public:
  CovarianceModel(Eigen::MatrixXd sigma, double lambda, double ridge);

  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  double lambda() const noexcept { return lambda_; }
  /// Absolute value added to the diagonal.
  double ridge() const noexcept { return ridge_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }

  /// sqrt(d^T Sigma^-1 d) via a triangular solve.
  double mahalanobis(std::span<const float> r, std::span<const float> m) const;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lambda_;
  double ridge_;
};

/// Sigma = sample covariance (K-1 denominator) + ridge * I, where
/// ridge = lambda * trace(cov) / d, falling back to lambda when the trace is
/// zero.
CovarianceModel fit_covariance(const MemoryBank& bank, double lambda);

double distance_euclidean(std::span<const float> r, std::span<const float> m);
double distance_mahalanobis(std::span<const float> r, std::span<const float> m,
                            const CovarianceModel& cov);

/// Neighborhood-softmax weight applied to the NN distance. Exponents are
/// distances divided by sqrt(d_model); with `max_shift` the largest exponent
/// is subtracted first.
double density_weight(double nn_distance, std::span<const double> neighborhood_distances,
                      std::size_t d_model, bool include_nearest = true, bool max_shift = true);

double distance_density(std::span<const float> r, const MemoryBank& bank, std::size_t b,
                        bool include_nearest = true);

/// Per-time-step scores over a contiguous time range. Steps without a score
/// are undefined.
class ScoreSeries {
 public:
  ScoreSeries() = default;
  ScoreSeries(std::size_t begin_time, std::size_t end_time);

  std::size_t begin_time() const noexcept { return begin_; }
  std::size_t end_time() const noexcept { return begin_ + values_.size(); }

  /// Throws Errc::InvalidArgument for out-of-range times or negative or
  /// non-finite scores.
  void set(std::size_t t, double score);
  std::optional<double> at(std::size_t t) const;

  std::size_t defined_count() const noexcept;
  std::vector<std::pair<std::size_t, double>> defined() const;

  /// Same scores over a wider range; new steps are undefined.
  ScoreSeries widened(std::size_t begin_time, std::size_t end_time) const;

  std::optional<double> threshold;

  bool operator==(const ScoreSeries&) const = default;

 private:
  std::size_t begin_ = 0;
  std::vector<std::optional<double>> values_;
};

/// Labels `score > theta` for defined steps.
std::vector<std::pair<std::size_t, bool>> apply_threshold(const ScoreSeries& scores, double theta);

/// `reference_time,score` with undefined steps omitted, shortest round-trip
/// number formatting.
void write_scores_csv(std::ostream& out, const ScoreSeries& scores);
ScoreSeries read_scores_csv(std::istream& in);

std::string format_real(double v);

struct ScoreRun {
  ScoreSeries scores;
  InsertionLog log;
  std::optional<double> ridge;  // absolute ridge, mahalanobis only
};

/// Scores rows in ascending reference time against the current bank. When
/// `novelty` is set each row is offered to the bank after it is scored.
/// Covariance for mahalanobis is fit once on the bank as passed in.
ScoreRun score_stream(MemoryBank& bank, const std::optional<NoveltyModel>& novelty,
                      const EmbeddingMatrix& embeddings, const DistanceSpec& dist);

}  // namespace tsad
