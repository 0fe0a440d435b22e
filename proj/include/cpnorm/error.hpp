#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpnorm {

enum class ErrorCode {
  InvalidInput,
  NotPsd,
  DimMismatch,
  ZeroInput,
  InvalidExponent,
  DegenerateMap,
  DeskScaleExceeded,
  NotApplicable,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::DegenerateMap: return "DegenerateMap";
    case ErrorCode::DeskScaleExceeded: return "DeskScaleExceeded";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cpnorm
