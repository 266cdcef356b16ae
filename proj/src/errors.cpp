#include "hypdyn/errors.hpp"

namespace hypdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SampleTooLarge: return "SampleTooLarge";
    case ErrorKind::CoverTooCoarse: return "CoverTooCoarse";
    case ErrorKind::Oversize: return "Oversize";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::NotOnLeaf: return "NotOnLeaf";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::TruncationDominated: return "TruncationDominated";
    case ErrorKind::NonFiniteExponent: return "NonFiniteExponent";
    case ErrorKind::NotCodimensionOne: return "NotCodimensionOne";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::DigitOutOfRange: return "DigitOutOfRange";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::SampleTooLarge:
    case ErrorKind::CoverTooCoarse:
    case ErrorKind::Oversize:
      return true;
    default:
      return false;
  }
}

}  // namespace hypdyn
