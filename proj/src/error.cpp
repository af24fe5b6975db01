#include "kemeny/error.hpp"

namespace kemeny {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::RateTooSmall: return "RateTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveRecurrent: return "NotPositiveRecurrent";
    case ErrorCode::SigmaVanishes: return "SigmaVanishes";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::TruncationRequired: return "TruncationRequired";
    case ErrorCode::RunawayTrajectory: return "RunawayTrajectory";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace kemeny
