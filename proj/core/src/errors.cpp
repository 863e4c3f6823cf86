#include "tsad/errors.hpp"

namespace tsad {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedFilename: return "malformed-filename";
    case Errc::NonNumericToken: return "non-numeric-token";
    case Errc::NonFiniteValue: return "non-finite-value";
    case Errc::RecordInvariant: return "record-invariant";
    case Errc::EmptyRegion: return "empty-region";
    case Errc::InvalidWindowSpec: return "invalid-window-spec";
    case Errc::ProviderUnavailable: return "provider-unavailable";
    case Errc::DimensionMismatch: return "dimension-mismatch";
    case Errc::BadMagic: return "bad-magic";
    case Errc::VersionMismatch: return "version-mismatch";
    case Errc::TruncatedPayload: return "truncated-payload";
    case Errc::ChecksumMismatch: return "checksum-mismatch";
    case Errc::InvalidMatrix: return "invalid-matrix";
    case Errc::EmptyBank: return "empty-bank";
    case Errc::EmptyTrainingSet: return "empty-training-set";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::CovarianceTooSmall: return "covariance-too-small";
    case Errc::CovarianceNonFinite: return "covariance-non-finite";
    case Errc::CovarianceSingular: return "covariance-singular";
    case Errc::NeighborCountExceedsBank: return "neighbor-count-exceeds-bank";
    case Errc::NoDefinedScores: return "no-defined-scores";
    case Errc::EmptyResults: return "empty-results";
    case Errc::MissingArtifact: return "missing-artifact";
    case Errc::ConfigError: return "config-error";
    case Errc::PathNotFound: return "path-not-found";
    case Errc::Io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace tsad
