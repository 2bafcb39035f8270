#include "metricforge/cli/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "metricforge/errors.hpp"

namespace metricforge::cli {
namespace {

void write(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(out, it.value(), depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(out, j[i], depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(out, j[i], depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string text = buf;
      if (text.find_first_of(".en") == std::string::npos) text += ".0";
      out += text;
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void bad(std::string_view what, std::string_view why) {
  throw Error(ErrorCode::parse_error, std::string(what) + ": " + std::string(why));
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += '\n';
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest(const Json& j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a(dump(j))));
  return buf;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (const auto& z : v.entries()) out.push_back(to_json(z));
  return out;
}

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ValidityReport& r) {
  return {{"hermitian_residual", r.hermitian_residual},
          {"intertwining_residual", r.intertwining_residual},
          {"min_metric_eigenvalue", r.min_metric_eigenvalue},
          {"positive", r.positive}};
}

Json to_json(const MetricOperator& m) {
  return {{"matrix", to_json(m.matrix)}, {"method", std::string(to_string(m.method))}, {"report", to_json(m.report)}};
}

Json to_json(const ParamMap& p) {
  Json out = Json::object();
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

Json to_json(const PhasePoint& p) {
  Json out{{"params", to_json(p.params)}};
  if (p.error) {
    out["error"] = *p.error;
    return out;
  }
  out["classification"] = std::string(to_string(p.classification));
  out["min_imag_gap"] = p.min_imag_gap;
  out["defect_indicator"] = p.defect_indicator;
  out["metric_min_eig"] = p.metric_min_eig ? Json(*p.metric_min_eig) : Json(nullptr);
  return out;
}

Json to_json(const Tolerances& tol) {
  Json out = Json::object();
  for (const auto& [k, v] : tolerance_entries(tol)) out[k] = v;
  return out;
}

Complex complex_from_json(const Json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad(what, "expected a number or a [re, im] pair");
}

ComplexVector vector_from_json(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) bad(what, "expected a non-empty array");
  std::vector<Complex> entries;
  for (const auto& e : j) entries.push_back(complex_from_json(e, what));
  try {
    return ComplexVector(std::move(entries));
  } catch (const Error& e) {
    bad(what, e.what());
  }
}

ComplexMatrix matrix_from_json(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) bad(what, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<Complex> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) bad(what, "every row must be a non-empty array");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) bad(what, "rows differ in length");
    for (const auto& e : row) entries.push_back(complex_from_json(e, what));
  }
  try {
    return ComplexMatrix(rows, cols, std::move(entries));
  } catch (const Error& e) {
    bad(what, e.what());
  }
}

DasConstruction das_from_json(const Json& j) {
  if (!j.is_object()) bad("das", "expected an object");
  for (const char* key : {"q0", "generators", "projectors", "phases"}) {
    if (!j.contains(key)) bad("das", std::string("missing '") + key + "'");
  }
  DasConstruction c;
  c.q0 = matrix_from_json(j["q0"], "das.q0");
  if (!j["generators"].is_array()) bad("das.generators", "expected an array");
  for (const auto& g : j["generators"]) {
    if (!g.is_object() || !g.contains("energy") || !g.contains("sigma")) {
      bad("das.generators", "each generator needs 'energy' and 'sigma'");
    }
    c.generators.push_back({complex_from_json(g["energy"], "das.generators.energy"),
                            matrix_from_json(g["sigma"], "das.generators.sigma")});
  }
  if (!j["projectors"].is_array()) bad("das.projectors", "expected an array");
  for (const auto& p : j["projectors"]) c.projectors.push_back(matrix_from_json(p, "das.projectors"));
  if (!j["phases"].is_array()) bad("das.phases", "expected an array");
  for (const auto& p : j["phases"]) c.phases.push_back(complex_from_json(p, "das.phases"));
  return c;
}

}  // namespace metricforge::cli
