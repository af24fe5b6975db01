#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kemeny {

enum class ErrorCode {
  NotSquare,
  RowSumViolation,
  NegativeEntry,
  NegativeOffDiagonal,
  NotIrreducible,
  SingularSystem,
  RateTooSmall,
  InvalidArgument,
  NotPositiveRecurrent,
  SigmaVanishes,
  QuadratureFailure,
  TruncationRequired,
  RunawayTrajectory,
  StepTooLarge,
  ParseError,
  UnknownFunction,
  UnknownIdentifier,
  DomainError,
  FileNotFound,
  MalformedJson,
  SchemaError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures: `position` is 1-based, counted in characters of the source.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, "at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DomainError : public Error {
 public:
  DomainError(double x, const std::string& message)
      : Error(ErrorCode::DomainError, message + " at x=" + std::to_string(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

}  // namespace kemeny
