#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roughflow {

enum class ErrorCode {
  invalid_argument,
  non_finite,
  non_contraction,
  max_iter_exceeded,
  lambda_search_exhausted,
  newton_divergence,
  series_diverged,
  bound_violated,
  fit_rejected,
  quadrature_diverged,
  config_invalid,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::invalid_argument, what);
}

}  // namespace roughflow
