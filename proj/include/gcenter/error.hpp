#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcenter {

/// Failure categories shared by every module. The CLI maps them to exit codes.
enum class ErrorKind {
  invalid_argument,
  invalid_model,
  incompatible_basis,
  invalid_grid,
  invalid_orientation,
  numerical_failure,
  calibration_failure,
  empty_diagram,
  out_of_range,
  nonlinear_regime,
  fit_failure,
  empty_stream,
  schema,
  malformed_input,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace gcenter
