#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsboost {

enum class ErrorCode {
  NonFiniteValue,
  RaggedLengths,
  NonIncreasingDomain,
  TooFewSeries,
  InvalidMembership,
  DomainTooShort,
  SingularSystem,
  ZeroResidual,
  LeverageOne,
  EDSaturated,
  FlatCriterion,
  InvalidArgument,
  LengthMismatch,
  SeriesTooShort,
  NegativeDistance,
  DegenerateBeta,
  EmptyCluster,
  DimensionMismatch,
  SizeMismatch,
  ConfigError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; `code()` names the
// failure kind so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsboost
