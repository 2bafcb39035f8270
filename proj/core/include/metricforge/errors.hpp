#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metricforge {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  non_finite,
  singular_matrix,
  no_convergence,
  defective_matrix,
  not_hermitian,
  defective_system,
  broken_phase,
  invalid_params,
  invalid_construction,
  no_bracket,
  not_positive,
  parse_error,
};

// Stable snake_case identifier, used in machine-readable error bodies.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace metricforge
