#pragma once

#include <stdexcept>
#include <string>

namespace floq {

/// Failure categories. The numeric values of the first three double as CLI exit codes.
enum class ErrorCode {
  Validation = 2,
  NotConverged = 3,
  Io = 4,
  NotBound = 5,
  GapUndefined = 6,
  NonStepDrive = 7,
  StepNotCommensurate = 8,
  MissingPhaseConvention = 9,
  NoRootInInterval = 10,
  PlanInvalid = 11,
  Internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_name(ErrorCode code) noexcept;

/// Process exit code for a failure: 2 validation, 3 numerical non-convergence, 4 I/O.
int exit_code_for(ErrorCode code) noexcept;

inline void require(bool ok, const std::string& message, ErrorCode code = ErrorCode::Validation) {
  if (!ok) throw Error(code, message);
}

}  // namespace floq
