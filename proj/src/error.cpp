#include "recaudit/error.hpp"

namespace recaudit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroInQ: return "ZeroInQ";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingleCategory: return "SingleCategory";
    case ErrorCode::ZeroActualSpread: return "ZeroActualSpread";
    case ErrorCode::ZeroActualMass: return "ZeroActualMass";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::NoTrainingHistory: return "NoTrainingHistory";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DivergedTraining: return "DivergedTraining";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::NoInverseStereotyped: return "NoInverseStereotyped";
    case ErrorCode::RateOutOfRange: return "RateOutOfRange";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::InconsistentReport: return "InconsistentReport";
  }
  return "Unknown";
}

}  // namespace recaudit
