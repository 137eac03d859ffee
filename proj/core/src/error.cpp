#include "roughflow/error.hpp"

namespace roughflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::non_contraction: return "NonContraction";
    case ErrorCode::max_iter_exceeded: return "MaxIterExceeded";
    case ErrorCode::lambda_search_exhausted: return "LambdaSearchExhausted";
    case ErrorCode::newton_divergence: return "NewtonDivergence";
    case ErrorCode::series_diverged: return "SeriesDiverged";
    case ErrorCode::bound_violated: return "BoundViolated";
    case ErrorCode::fit_rejected: return "FitRejected";
    case ErrorCode::quadrature_diverged: return "QuadratureDiverged";
    case ErrorCode::config_invalid: return "ConfigInvalid";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace roughflow
