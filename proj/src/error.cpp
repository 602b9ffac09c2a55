#include "exi/error.hpp"

namespace exi {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::TooFewExceedances: return "TooFewExceedances";
    case ErrorCode::EmptyGaps: return "EmptyGaps";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ZeroNormalizedSum: return "ZeroNormalizedSum";
    case ErrorCode::NoClusters: return "NoClusters";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::NoPlateau: return "NoPlateau";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace exi
