#pragma once

#include <stdexcept>
#include <string>

namespace bubbletree {

enum class ErrorCode {
  SouthPole,
  AntipodalPoints,
  TooFarFromTarget,
  Pole,
  ScalesTooClose,
  PoleInDomain,
  TubularNeighborhoodViolated,
  InvalidResolution,
  NonIntegrableTail,
  NonTangentVariation,
  EmptyTestSpace,
  SingularGram,
  NonpositiveDenominator,
  DegenerateDifferential,
  AssumptionViolated,
  AllCoefficientsZero,
  StepRejected,
  ConfigInvalid,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::SouthPole: return "SouthPole";
    case ErrorCode::AntipodalPoints: return "AntipodalPoints";
    case ErrorCode::TooFarFromTarget: return "TooFarFromTarget";
    case ErrorCode::Pole: return "Pole";
    case ErrorCode::ScalesTooClose: return "ScalesTooClose";
    case ErrorCode::PoleInDomain: return "PoleInDomain";
    case ErrorCode::TubularNeighborhoodViolated: return "TubularNeighborhoodViolated";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::NonIntegrableTail: return "NonIntegrableTail";
    case ErrorCode::NonTangentVariation: return "NonTangentVariation";
    case ErrorCode::EmptyTestSpace: return "EmptyTestSpace";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::NonpositiveDenominator: return "NonpositiveDenominator";
    case ErrorCode::DegenerateDifferential: return "DegenerateDifferential";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::AllCoefficientsZero: return "AllCoefficientsZero";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace bubbletree
