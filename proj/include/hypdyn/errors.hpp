#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypdyn {

enum class ErrorKind {
  InvalidInput,
  SampleTooLarge,
  CoverTooCoarse,
  Oversize,
  NotHyperbolic,
  NotOnLeaf,
  InsufficientData,
  TruncationDominated,
  NonFiniteExponent,
  NotCodimensionOne,
  InvalidPath,
  DigitOutOfRange,
};

std::string_view to_string(ErrorKind kind);

/// Validation errors are caused by the caller's parameters; everything else
/// is a numerical or structural failure of the requested computation.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hypdyn
