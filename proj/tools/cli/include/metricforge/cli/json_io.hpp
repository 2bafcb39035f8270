#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "metricforge/linalg.hpp"
#include "metricforge/metric.hpp"
#include "metricforge/models.hpp"
#include "metricforge/phase.hpp"

namespace metricforge::cli {

using Json = nlohmann::json;

/// Canonical serialization: sorted keys, two-space indent, floats as %.17g
/// (with a trailing ".0" on integral values so they re-parse as floats).
std::string dump(const Json& j);

std::uint64_t fnv1a(std::string_view bytes);
std::string digest(const Json& j);

Json to_json(Complex z);
Json to_json(const ComplexVector& v);
Json to_json(const ComplexMatrix& m);
Json to_json(const ValidityReport& r);
Json to_json(const MetricOperator& m);
Json to_json(const ParamMap& p);
Json to_json(const PhasePoint& p);
Json to_json(const Tolerances& tol);

/// Accepts a number or a [re, im] pair. Throws Error(parse_error).
Complex complex_from_json(const Json& j, std::string_view what);
ComplexVector vector_from_json(const Json& j, std::string_view what);
ComplexMatrix matrix_from_json(const Json& j, std::string_view what);
DasConstruction das_from_json(const Json& j);

}  // namespace metricforge::cli
