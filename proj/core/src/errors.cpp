#include "ramem/error.hpp"

namespace ramem {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CouplingDegenerate: return "CouplingDegenerate";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadWaveformParams: return "BadWaveformParams";
    case ErrorCode::ZeroEnergyWaveform: return "ZeroEnergyWaveform";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DivisionNearZeroControl: return "DivisionNearZeroControl";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ramem
