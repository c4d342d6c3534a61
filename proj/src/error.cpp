#include "prodcoef/error.hpp"

namespace prodcoef {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kIndex: return "index";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kConstraint: return "constraint";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kEmptyNeighborhood: return "empty-neighborhood";
    case ErrorCode::kStratification: return "stratification";
    case ErrorCode::kLabelsRequired: return "labeled-data-required";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInconsistentMeasure: return "inconsistent-measure";
  }
  return "unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration:
    case ErrorCode::kDimension:
    case ErrorCode::kDomain:
    case ErrorCode::kIndex:
    case ErrorCode::kConstraint:
      return ErrorKind::kValidation;
    case ErrorCode::kIo:
      return ErrorKind::kIo;
    default:
      return ErrorKind::kData;
  }
}

}  // namespace prodcoef
