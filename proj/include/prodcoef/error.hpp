#pragma once

#include <stdexcept>
#include <string>

namespace prodcoef {

// Coarse failure class; the CLI maps each one to its exit code.
enum class ErrorKind {
  kValidation = 1,  // bad arguments or configuration
  kIo = 2,          // file missing, unreadable, unwritable
  kData = 3,        // malformed or inconsistent input data
};

enum class ErrorCode {
  kConfiguration,
  kDomain,
  kIndex,
  kDimension,
  kConstraint,
  kInsufficientData,
  kEmptyInput,
  kEmptyNeighborhood,
  kStratification,
  kLabelsRequired,
  kIo,
  kFormat,
  kUnsupported,
  kCorruption,
  kParse,
  kInconsistentMeasure,
};

const char* to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorKind kind() const { return kind_of(code_); }
  int exit_code() const { return static_cast<int>(kind()); }

 private:
  ErrorCode code_;
};

}  // namespace prodcoef
