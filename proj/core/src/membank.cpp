#include "tsad/membank.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <unordered_map>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(Errc::DimensionMismatch, std::string(what) + " has dimension " +
                                             std::to_string(got) + ", bank dimension is " +
                                             std::to_string(expected));
  }
}

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

}  // namespace

const char* provenance_name(Provenance p) noexcept {
  return p == Provenance::Train ? "train" : "adapted";
}

MemoryBank::MemoryBank(std::size_t dim, std::optional<std::size_t> capacity_limit)
    : dim_(dim), capacity_limit_(capacity_limit) {}

void MemoryBank::set_capacity_limit(std::optional<std::size_t> limit) {
  if (limit && size() > *limit) {
    throw Error(Errc::InvalidArgument, "bank holds " + std::to_string(size()) +
                                           " items, above capacity limit " +
                                           std::to_string(*limit));
  }
  capacity_limit_ = limit;
}

void MemoryBank::append(std::span<const float> row, const BankItemInfo& info) {
  check_dim(dim_, row.size(), "appended row");
  if (full()) {
    throw Error(Errc::InvalidArgument,
                "bank is at its capacity limit of " + std::to_string(*capacity_limit_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  infos_.push_back(info);
}

std::size_t MemoryBank::count(Provenance p) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(infos_.begin(), infos_.end(), [p](const auto& i) { return i.provenance == p; }));
}

EmbeddingMatrix MemoryBank::to_matrix() const {
  EmbeddingMatrix m;
  m.rows = size();
  m.dim = dim_;
  m.data = data_;
  m.reference_times.reserve(size());
  for (const auto& i : infos_) m.reference_times.push_back(i.reference_time);
  return m;
}

std::size_t InsertionLog::inserted() const noexcept {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& e) {
    return e.kind == InsertionEvent::Kind::Inserted;
  }));
}

std::size_t InsertionLog::capacity_events() const noexcept {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& e) {
    return e.kind == InsertionEvent::Kind::CapacityFull;
  }));
}

double squared_l2(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  const float* pa = a.data();
  const float* pb = b.data();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = static_cast<double>(pa[i]) - pb[i];
    const double d1 = static_cast<double>(pa[i + 1]) - pb[i + 1];
    const double d2 = static_cast<double>(pa[i + 2]) - pb[i + 2];
    const double d3 = static_cast<double>(pa[i + 3]) - pb[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = static_cast<double>(pa[i]) - pb[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

MemoryBank build_bank(const EmbeddingMatrix& train_embeddings) {
  if (train_embeddings.rows == 0) {
    throw Error(Errc::EmptyBank, "cannot build a memory bank from zero training rows");
  }
  MemoryBank bank(train_embeddings.dim);
  for (std::size_t i = 0; i < train_embeddings.rows; ++i) {
    bank.append(train_embeddings.row(i),
                BankItemInfo{Provenance::Train, i, train_embeddings.reference_times[i]});
  }
  return bank;
}

std::vector<std::size_t> kcenter_select(const MemoryBank& bank, std::size_t max_size,
                                        std::size_t first_index) {
  if (max_size < 1) throw Error(Errc::InvalidArgument, "coreset size must be >= 1");
  const std::size_t n = bank.size();
  if (n == 0) return {};
  if (first_index >= n) {
    throw Error(Errc::InvalidArgument, "start index " + std::to_string(first_index) +
                                           " outside bank of size " + std::to_string(n));
  }
  const std::size_t k = std::min(max_size, n);

  // min squared distance from each item to the selection; -1 marks selected
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> selected;
  selected.reserve(k);
  std::size_t next = first_index;
  while (true) {
    selected.push_back(next);
    min_dist[next] = -1.0;
    if (selected.size() == k) break;
    const auto center = bank.item(next);
    std::size_t best = n;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      const double d = squared_l2(bank.item(i), center);
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    next = best;
  }
  return selected;
}

std::size_t kcenter_start_index(std::size_t bank_size, std::uint64_t seed) {
  if (bank_size == 0) return 0;
  std::mt19937_64 rng(seed);
  return static_cast<std::size_t>(rng() % bank_size);
}

MemoryBank kcenter_coreset(const MemoryBank& bank, std::size_t max_size, std::uint64_t seed) {
  if (max_size < 1) throw Error(Errc::InvalidArgument, "coreset size must be >= 1");
  if (bank.size() <= max_size) return bank;
  auto selected = kcenter_select(bank, max_size, kcenter_start_index(bank.size(), seed));
  std::sort(selected.begin(), selected.end());
  MemoryBank out(bank.dim(), bank.capacity_limit());
  for (std::size_t i : selected) out.append(bank.item(i), bank.info(i));
  return out;
}

double coverage_radius(const MemoryBank& bank, std::span<const std::size_t> selected) {
  if (selected.empty()) {
    return bank.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  double radius = 0.0;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s : selected) best = std::min(best, squared_l2(bank.item(i), bank.item(s)));
    radius = std::max(radius, best);
  }
  return std::sqrt(radius);
}

Neighbor nearest_neighbor(const MemoryBank& bank, std::span<const float> query) {
  if (bank.empty()) throw Error(Errc::EmptyBank, "nearest-neighbor query on an empty bank");
  check_dim(bank.dim(), query.size(), "query");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double d = squared_l2(bank.item(i), query);
    if (d < best_sq) {
      best_sq = d;
      best = i;
    }
  }
  return {best, std::sqrt(best_sq)};
}

std::vector<Neighbor> k_nearest(const MemoryBank& bank, std::span<const float> query,
                                std::size_t k, std::optional<std::size_t> exclude) {
  check_dim(bank.dim(), query.size(), "query");
  std::vector<Neighbor> all;
  all.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (exclude && *exclude == i) continue;
    all.push_back({i, std::sqrt(squared_l2(bank.item(i), query))});
  }
  const std::size_t m = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(),
                    neighbor_less);
  all.resize(m);
  return all;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::EmptyTrainingSet, "percentile of an empty set");
  if (!(q > 0.0 && q <= 100.0)) {
    throw Error(Errc::InvalidArgument, "percentile must lie in (0, 100], got " + std::to_string(q));
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // q*n is exact for integral q; the epsilon absorbs representation error otherwise
  auto rank = static_cast<std::size_t>(std::ceil(q * n / 100.0 - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

NoveltyModel fit_novelty(const MemoryBank& bank, const EmbeddingMatrix& train_embeddings,
                         double q) {
  if (bank.empty()) throw Error(Errc::EmptyBank, "novelty threshold needs a nonempty bank");
  if (train_embeddings.rows == 0) {
    throw Error(Errc::EmptyTrainingSet, "novelty threshold needs at least one training row");
  }
  check_dim(bank.dim(), train_embeddings.dim, "training matrix");

  std::unordered_map<std::size_t, std::size_t> member_of;
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const auto& info = bank.info(j);
    if (info.provenance == Provenance::Train && info.source_index) {
      member_of.emplace(*info.source_index, j);
    }
  }

  std::vector<double> distances;
  distances.reserve(train_embeddings.rows);
  for (std::size_t i = 0; i < train_embeddings.rows; ++i) {
    const auto row = train_embeddings.row(i);
    std::optional<std::size_t> self;
    if (auto it = member_of.find(i); it != member_of.end()) {
      const auto item = bank.item(it->second);
      if (std::memcmp(item.data(), row.data(), row.size_bytes()) == 0) self = it->second;
    }
    if (!self) {
      distances.push_back(nearest_neighbor(bank, row).distance);
      continue;
    }
    const auto nn = k_nearest(bank, row, 1, self);
    if (!nn.empty()) distances.push_back(nn.front().distance);
  }
  if (distances.empty()) {
    throw Error(Errc::EmptyTrainingSet,
                "every training row is the sole bank member; no neighbor distances to rank");
  }
  return NoveltyModel{nearest_rank_percentile(std::move(distances), q), q};
}

bool ttamb_insert(MemoryBank& bank, const NoveltyModel& novelty, std::span<const float> candidate,
                  double nn_distance, std::uint64_t reference_time, InsertionLog* log) {
  check_dim(bank.dim(), candidate.size(), "candidate");
  InsertionEvent event{reference_time, nn_distance, InsertionEvent::Kind::Rejected};
  if (nn_distance > novelty.threshold) {
    if (bank.full()) {
      event.kind = InsertionEvent::Kind::CapacityFull;
    } else {
      bank.append(candidate, BankItemInfo{Provenance::Adapted, std::nullopt, reference_time});
      event.kind = InsertionEvent::Kind::Inserted;
    }
  }
  if (log) log->events.push_back(event);
  return event.kind == InsertionEvent::Kind::Inserted;
}

}  // namespace tsad
