#pragma once

#include <stdexcept>
#include <string>

namespace exi {

enum class ErrorCode {
  InvalidSeries,
  TooFewExceedances,
  EmptyGaps,
  DegenerateDenominator,
  ZeroNormalizedSum,
  NoClusters,
  BadK,
  NonFinite,
  DegenerateTail,
  NoPlateau,
  InvalidParams,
  InvalidConfig,
  ParseError,
  EmptyColumn,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace exi
