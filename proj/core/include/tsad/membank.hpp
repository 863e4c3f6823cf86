#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsad/embedding.hpp"

namespace tsad {

enum class Provenance : std::uint8_t { Train, Adapted };

const char* provenance_name(Provenance p) noexcept;

struct BankItemInfo {
  Provenance provenance = Provenance::Train;
  /// Row of the training matrix this item was copied from (train items only).
  std::optional<std::size_t> source_index;
  std::uint64_t reference_time = 0;

  bool operator==(const BankItemInfo&) const = default;
};

/// Ordered set of stored representations. Items are contiguous float rows.
class MemoryBank {
 public:
  MemoryBank() = default;
  explicit MemoryBank(std::size_t dim, std::optional<std::size_t> capacity_limit = std::nullopt);

  std::size_t size() const noexcept { return infos_.size(); }
  bool empty() const noexcept { return infos_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const float> item(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const BankItemInfo& info(std::size_t i) const { return infos_[i]; }
  std::span<const float> data() const noexcept { return data_; }

  std::optional<std::size_t> capacity_limit() const noexcept { return capacity_limit_; }
  /// Throws Errc::InvalidArgument when the bank already exceeds the new limit.
  void set_capacity_limit(std::optional<std::size_t> limit);
  bool full() const noexcept { return capacity_limit_ && size() >= *capacity_limit_; }

  /// Throws Errc::DimensionMismatch, or Errc::InvalidArgument when full.
  void append(std::span<const float> row, const BankItemInfo& info);

  std::size_t count(Provenance p) const noexcept;

  /// Rows and reference times as an EmbeddingMatrix (for TREP storage).
  EmbeddingMatrix to_matrix() const;

  bool operator==(const MemoryBank&) const = default;

 private:
  std::size_t dim_ = 0;
  std::optional<std::size_t> capacity_limit_;
  std::vector<float> data_;
  std::vector<BankItemInfo> infos_;
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

struct NoveltyModel {
  double threshold = 0.0;  // tau, Euclidean units
  double percentile = 80.0;
};

struct InsertionEvent {
  enum class Kind : std::uint8_t { Inserted, Rejected, CapacityFull };
  std::uint64_t reference_time = 0;
  double nn_distance = 0.0;
  Kind kind = Kind::Rejected;

  bool operator==(const InsertionEvent&) const = default;
};

struct InsertionLog {
  std::vector<InsertionEvent> events;

  std::size_t inserted() const noexcept;
  std::size_t capacity_events() const noexcept;
};

/// Sum of squared differences, accumulated in double.
double squared_l2(std::span<const float> a, std::span<const float> b);

MemoryBank build_bank(const EmbeddingMatrix& train_embeddings);

/// Greedy farthest-point selection starting from `first_index`. Returns the
/// selected indices in selection order.
std::vector<std::size_t> kcenter_select(const MemoryBank& bank, std::size_t max_size,
                                        std::size_t first_index);

/// Greedy k-Center coreset with a seed-chosen starting item. The returned
/// bank keeps the original relative order of the selected items.
MemoryBank kcenter_coreset(const MemoryBank& bank, std::size_t max_size, std::uint64_t seed);

/// Index of the first item picked by kcenter_coreset for this seed.
std::size_t kcenter_start_index(std::size_t bank_size, std::uint64_t seed);

/// Max over all bank items of the distance to the nearest selected item.
double coverage_radius(const MemoryBank& bank, std::span<const std::size_t> selected);

/// Exact linear-scan nearest neighbor; ties go to the lowest index.
Neighbor nearest_neighbor(const MemoryBank& bank, std::span<const float> query);

/// The k nearest items sorted by (distance, index), optionally skipping one
/// item. Returns fewer than k when the bank is too small.
std::vector<Neighbor> k_nearest(const MemoryBank& bank, std::span<const float> query,
                                std::size_t k,
                                std::optional<std::size_t> exclude = std::nullopt);

/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value (1-based).
double nearest_rank_percentile(std::vector<double> values, double q);

/// Builds tau from training NN distances. A training row that is itself a
/// bank member (same source index, bitwise-identical values) is matched
/// against the remaining items instead of itself.
NoveltyModel fit_novelty(const MemoryBank& bank, const EmbeddingMatrix& train_embeddings,
                         double q = 80.0);

/// Appends `candidate` when `nn_distance` (its NN distance to the bank before
/// this call) strictly exceeds tau and capacity allows.
bool ttamb_insert(MemoryBank& bank, const NoveltyModel& novelty, std::span<const float> candidate,
                  double nn_distance, std::uint64_t reference_time = 0,
                  InsertionLog* log = nullptr);

}  // namespace tsad
