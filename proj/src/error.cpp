#include "pfc/error.hpp"

namespace pfc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateResponses: return "DegenerateResponses";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::UnsupportedFyKind: return "UnsupportedFyKind";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::LevelCrossing: return "LevelCrossing";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pfc
