#pragma once

#include <stdexcept>
#include <string>

namespace emperor {

enum class ErrorCode {
  InvalidArgument,
  WeightSum,
  NonPositiveWeight,
  AsymmetricCovariance,
  NonPDCovariance,
  RaggedRows,
  NonFiniteEntry,
  EmptyInput,
  DimensionMismatch,
  NonUnitDirection,
  InsufficientMoments,
  NonPositiveEvenMoment,
  DegreeCapExceeded,
  Overflow,
  RankDeficient,
  TooFewSamples,
  WidthMismatch,
  IoError,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Library-wide exception type. `code()` identifies the violated contract so
/// callers can branch on it without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace emperor
