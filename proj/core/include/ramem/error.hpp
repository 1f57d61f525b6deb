#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ramem {

enum class ErrorCode {
  CouplingDegenerate,
  BadParams,
  BadWaveformParams,
  ZeroEnergyWaveform,
  OutOfRange,
  GridMismatch,
  DivisionNearZeroControl,
  GridTooCoarse,
  NonFiniteField,
  DegenerateInput,
  ModeMismatch,
  NoConvergence,
  BadConfig,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ramem
