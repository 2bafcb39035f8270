#include "metricforge/errors.hpp"

namespace metricforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::singular_matrix: return "singular_matrix";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::defective_matrix: return "defective_matrix";
    case ErrorCode::not_hermitian: return "not_hermitian";
    case ErrorCode::defective_system: return "defective_system";
    case ErrorCode::broken_phase: return "broken_phase";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::invalid_construction: return "invalid_construction";
    case ErrorCode::no_bracket: return "no_bracket";
    case ErrorCode::not_positive: return "not_positive";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace metricforge
