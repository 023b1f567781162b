#pragma once

#include <stdexcept>
#include <string>

namespace scatterlab {

// Numeric values are mirrored by sl_status in scatterlab.h.
enum class ErrorCode {
  Domain = 1,
  Contract = 2,
  Identification = 3,
  Integration = 4,
  NoConnection = 5,
  NotDifferentiable = 6,
  NearGrazing = 7,
  TurningPoint = 8,
  Config = 9,
  SamplingMismatch = 10,
  Io = 11,
  InvalidArgument = 12,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scatterlab
