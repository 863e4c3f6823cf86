#include "tsad/trep.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <zlib.h>

#include "tsad/errors.hpp"

namespace tsad {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'E', 'P'};

template <typename T>
void put_le(std::vector<unsigned char>& buf, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<unsigned char>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

std::uint32_t crc32_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large payloads.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t checked_u32(std::size_t v, const char* field) {
  if (v > 0xFFFFFFFFu) {
    throw Error(Errc::InvalidArgument, std::string(field) + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& trep_path) {
  return std::filesystem::path(trep_path.string() + ".meta.json");
}

void write_trep(const EmbeddingMatrix& matrix, const EmbeddingConfig& meta,
                const std::filesystem::path& path) {
  matrix.validate();
  std::vector<unsigned char> buf;
  buf.reserve(kTrepHeaderSize + matrix.data.size() * 4 + matrix.rows * 8 + 4);
  buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(buf, kTrepVersion);
  put_le<std::uint16_t>(buf, 0);
  put_le<std::uint32_t>(buf, checked_u32(matrix.dim, "d_model"));
  put_le<std::uint32_t>(buf, checked_u32(meta.layer, "layer"));
  put_le<std::uint32_t>(buf, checked_u32(meta.spec.reference_patch, "reference_patch"));
  put_le<std::uint64_t>(buf, matrix.rows);
  for (float f : matrix.data) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(f));
  for (std::uint64_t t : matrix.reference_times) put_le<std::uint64_t>(buf, t);
  put_le<std::uint32_t>(buf, crc32_of(buf.data(), buf.size()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::Io, "short write to '" + path.string() + "'");
}

std::pair<EmbeddingMatrix, EmbeddingConfig> read_trep(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::PathNotFound, "cannot open '" + path.string() + "'");
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  const std::string where = "'" + path.string() + "'";

  if (buf.size() < sizeof(kMagic)) {
    throw Error(Errc::TruncatedPayload, where + " is shorter than the magic");
  }
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::BadMagic, where + " does not start with 'TREP'");
  }
  if (buf.size() < kTrepHeaderSize + 4) {
    throw Error(Errc::TruncatedPayload, where + " is shorter than the header");
  }
  const auto version = get_le<std::uint16_t>(buf.data() + 4);
  if (version != kTrepVersion) {
    throw Error(Errc::VersionMismatch,
                where + " has version " + std::to_string(version) + ", expected " +
                    std::to_string(kTrepVersion));
  }
  const auto d_model = get_le<std::uint32_t>(buf.data() + 8);
  const auto layer = get_le<std::uint32_t>(buf.data() + 12);
  const auto ref_patch = get_le<std::uint32_t>(buf.data() + 16);
  const auto rows = get_le<std::uint64_t>(buf.data() + 20);

  const std::size_t available = buf.size() - kTrepHeaderSize - 4;
  const std::size_t row_bytes = static_cast<std::size_t>(d_model) * 4 + 8;
  if (rows > available / row_bytes) {
    throw Error(Errc::TruncatedPayload, where + " declares " + std::to_string(rows) +
                                            " rows but the payload is too short");
  }
  const std::size_t expected = kTrepHeaderSize + rows * row_bytes + 4;
  if (buf.size() != expected) {
    throw Error(Errc::InvalidMatrix, where + " has " + std::to_string(buf.size() - expected) +
                                         " trailing bytes");
  }
  const auto stored_crc = get_le<std::uint32_t>(buf.data() + expected - 4);
  if (crc32_of(buf.data(), expected - 4) != stored_crc) {
    throw Error(Errc::ChecksumMismatch, where + " failed CRC-32 verification");
  }

  EmbeddingMatrix m(rows, d_model);
  const unsigned char* p = buf.data() + kTrepHeaderSize;
  for (float& f : m.data) {
    f = std::bit_cast<float>(get_le<std::uint32_t>(p));
    p += 4;
  }
  for (auto& t : m.reference_times) {
    t = get_le<std::uint64_t>(p);
    p += 8;
  }
  m.validate();

  EmbeddingConfig cfg;
  cfg.d_model = d_model;
  cfg.layer = layer;
  cfg.spec.reference_patch = ref_patch;
  if (auto side = read_sidecar(path)) {
    cfg.provider_id = side->provider_id;
    cfg.spec = side->spec;
    cfg.spec.reference_patch = ref_patch;
  }
  return {std::move(m), cfg};
}

void write_sidecar(const std::filesystem::path& trep_path, const TrepSidecar& sidecar) {
  nlohmann::ordered_json j;
  j["provider_id"] = sidecar.provider_id;
  j["dataset"] = sidecar.dataset;
  j["window_spec"] = {
      {"window_length", sidecar.spec.window_length},
      {"patch_length", sidecar.spec.patch_length},
      {"reference_patch", sidecar.spec.reference_patch},
      {"stride", sidecar.spec.stride},
  };
  j["layer"] = sidecar.layer;
  j["d_model"] = sidecar.d_model;
  for (const auto& [key, value] : sidecar.extra.items()) j[key] = value;

  const auto path = sidecar_path(trep_path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::optional<TrepSidecar> read_sidecar(const std::filesystem::path& trep_path) {
  const auto path = sidecar_path(trep_path);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, "malformed sidecar '" + path.string() + "': " + e.what());
  }
  TrepSidecar s;
  s.provider_id = j.value("provider_id", "");
  s.dataset = j.value("dataset", "");
  if (j.contains("window_spec")) {
    const auto& w = j["window_spec"];
    s.spec.window_length = w.value("window_length", s.spec.window_length);
    s.spec.patch_length = w.value("patch_length", s.spec.patch_length);
    s.spec.reference_patch = w.value("reference_patch", s.spec.reference_patch);
    s.spec.stride = w.value("stride", s.spec.stride);
  }
  s.layer = j.value("layer", std::size_t{0});
  s.d_model = j.value("d_model", std::size_t{0});
  for (const auto& [key, value] : j.items()) {
    if (key != "provider_id" && key != "dataset" && key != "window_spec" && key != "layer" &&
        key != "d_model") {
      s.extra[key] = value;
    }
  }
  return s;
}

}  // namespace tsad
