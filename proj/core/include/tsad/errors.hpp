#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsad {

enum class Errc {
  // data_ingest
  MalformedFilename,
  NonNumericToken,
  NonFiniteValue,
  RecordInvariant,
  EmptyRegion,
  InvalidWindowSpec,
  // embedding / TREP
  ProviderUnavailable,
  DimensionMismatch,
  BadMagic,
  VersionMismatch,
  TruncatedPayload,
  ChecksumMismatch,
  InvalidMatrix,
  // membank
  EmptyBank,
  EmptyTrainingSet,
  InvalidArgument,
  // scoring
  CovarianceTooSmall,
  CovarianceNonFinite,
  CovarianceSingular,
  NeighborCountExceedsBank,
  // eval
  NoDefinedScores,
  EmptyResults,
  MissingArtifact,
  // cli / config
  ConfigError,
  PathNotFound,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Library-wide exception. Every failure carries a distinct code so callers
/// can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tsad
