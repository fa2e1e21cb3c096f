#pragma once

#include <stdexcept>
#include <string>

namespace frit {

enum class ErrorCode {
  kInvalidArgument = 1,
  kImproper,
  kSampleTimeMismatch,
  kAlgebraicLoop,
  kNonInvertible,
  kFictitiousHeadZero,
  kAssumptionViolated,
  kDataMalformed,
  kNumerical,
  kUnknownName,
  kIo,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type; the code survives the
// trip across the C boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace frit
