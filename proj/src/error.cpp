#include "gcenter/error.hpp"

namespace gcenter {

std::string_view to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_model: return "invalid-model";
    case ErrorKind::incompatible_basis: return "incompatible-basis";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::invalid_orientation: return "invalid-orientation";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::calibration_failure: return "calibration-failure";
    case ErrorKind::empty_diagram: return "empty-diagram";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::nonlinear_regime: return "nonlinear-regime";
    case ErrorKind::fit_failure: return "fit-failure";
    case ErrorKind::empty_stream: return "empty-stream";
    case ErrorKind::schema: return "schema";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& message)
{
  throw Error(kind, message);
}

}  // namespace gcenter
