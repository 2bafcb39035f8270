#include "metricforge/cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "metricforge/cli/json_io.hpp"
#include "metricforge/csv.hpp"
#include "metricforge/dynamics.hpp"
#include "metricforge/metric.hpp"
#include "metricforge/version.hpp"

namespace metricforge::cli {
namespace {

[[noreturn]] void parse_fail(const std::string& message) { throw Error(ErrorCode::parse_error, message); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// ------------------------------------------------------------ options and input

struct Common {
  std::string model;
  std::string params;
  std::string in_path;
  std::vector<std::string> tols;
  std::string out_dir;
  std::string normalization;
};

void add_input_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--model", c.model, "Model family: jc_doublet, jc_full, pt_matrix, dirac_scalar");
  cmd->add_option("--params", c.params, "Model parameters as name=value,name=value");
  cmd->add_option("--in", c.in_path, "JSON input document");
}

void add_output_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol", c.tols, "Tolerance override name=value (repeatable)");
  cmd->add_option("--out", c.out_dir, "Directory for result.json and CSV files");
}

struct Input {
  Json echo;
  std::optional<ModelInstance> model;
  ComplexMatrix h;
  std::optional<ComplexMatrix> s;
  std::optional<ComplexMatrix> metric;
  std::optional<DasConstruction> das;
};

Input model_input(std::string_view family, const ParamMap& params) {
  Input in;
  in.model = make_model(family, params);
  in.h = in.model->hamiltonian;
  in.s = in.model->similarity;
  in.echo = {{"model", {{"family", std::string(to_string(in.model->family))}, {"params", to_json(in.model->params)}}}};
  return in;
}

Input load_input(const Common& c) {
  if (!c.in_path.empty() && !c.model.empty()) parse_fail("give either --in or --model, not both");
  if (!c.model.empty()) return model_input(c.model, parse_params(c.params));
  if (c.in_path.empty()) parse_fail("an input is required: --model/--params or --in");

  std::ifstream file(c.in_path);
  if (!file) parse_fail("cannot read input file '" + c.in_path + "'");
  Json doc;
  try {
    doc = Json::parse(file);
  } catch (const Json::exception& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || (doc.contains("model") == doc.contains("matrix"))) {
    parse_fail("input must contain exactly one of 'model' or 'matrix'");
  }
  if (doc.contains("model")) {
    const Json& m = doc["model"];
    if (!m.is_object() || !m.contains("family") || !m["family"].is_string()) parse_fail("model.family must be a string");
    ParamMap params;
    if (m.contains("params")) {
      if (!m["params"].is_object()) parse_fail("model.params must be an object");
      for (auto it = m["params"].begin(); it != m["params"].end(); ++it) {
        if (!it.value().is_number()) parse_fail("model.params." + it.key() + " must be a number");
        params[it.key()] = it.value().get<double>();
      }
    }
    Input in = model_input(m["family"].get<std::string>(), params);
    if (doc.contains("metric")) in.metric = matrix_from_json(doc["metric"], "metric");
    if (in.metric) in.echo["metric"] = to_json(*in.metric);
    return in;
  }
  const Json& m = doc["matrix"];
  if (!m.is_object() || !m.contains("h")) parse_fail("matrix.h is required");
  Input in;
  in.h = matrix_from_json(m["h"], "matrix.h");
  if (!in.h.is_square()) parse_fail("matrix.h must be square");
  Json echo{{"h", to_json(in.h)}};
  auto same_shape = [&](const ComplexMatrix& x, const char* what) {
    if (x.rows() != in.h.rows() || x.cols() != in.h.cols()) parse_fail(std::string(what) + " must match matrix.h in size");
  };
  if (m.contains("s")) {
    in.s = matrix_from_json(m["s"], "matrix.s");
    same_shape(*in.s, "matrix.s");
    echo["s"] = to_json(*in.s);
  }
  if (m.contains("metric")) {
    in.metric = matrix_from_json(m["metric"], "matrix.metric");
    same_shape(*in.metric, "matrix.metric");
    echo["metric"] = to_json(*in.metric);
  }
  if (m.contains("das")) {
    in.das = das_from_json(m["das"]);
    echo["das"] = m["das"];
  }
  in.echo = {{"matrix", echo}};
  return in;
}

Tolerances load_tolerances(const std::vector<std::string>& specs) {
  Tolerances tol;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) parse_fail("--tol expects name=value, got '" + spec + "'");
    const auto value = to_double(std::string_view(spec).substr(eq + 1));
    if (!value || *value < 0.0) parse_fail("--tol value for '" + spec.substr(0, eq) + "' must be a nonnegative number");
    if (!set_tolerance(tol, trim(std::string_view(spec).substr(0, eq)), *value)) {
      parse_fail("unknown tolerance '" + spec.substr(0, eq) + "'");
    }
  }
  return tol;
}

std::optional<Normalization> load_normalization(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto n = parse_normalization(text);
  if (!n) parse_fail("unknown normalization '" + text + "' (unit_left, unit_right, balanced)");
  return n;
}

// ------------------------------------------------------------ metric helpers

MetricOperator numeric_spectral(const ComplexMatrix& h, Normalization n, const Tolerances& tol) {
  const EigenAnalysis analysis = eigen_analysis(h, tol);
  return spectral_metric(biorthonormalize(analysis.pairs, n, tol, norm(h)), h, tol);
}

MetricOperator spectral_for(const Input& in, std::optional<Normalization> n, const Tolerances& tol) {
  if (in.model && !n) return model_spectral_metric(*in.model, tol);
  return numeric_spectral(in.h, n.value_or(Normalization::unit_left), tol);
}

MetricOperator das_for(const Input& in, const Tolerances& tol) {
  if (in.model) return model_das_metric(*in.model, tol);
  if (!in.das) {
    throw Error(ErrorCode::invalid_construction,
                "the Das method needs a model input or a 'das' block in the matrix input");
  }
  return das_metric(*in.das, in.h, tol);
}

MetricOperator metric_by_name(const Input& in, const std::string& name, std::optional<Normalization> n,
                              const Tolerances& tol) {
  if (name == "spectral") return spectral_for(in, n, tol);
  if (name == "das") return das_for(in, tol);
  if (name == "analytic") {
    if (!in.model) throw Error(ErrorCode::invalid_argument, "analytic metrics exist only for model inputs");
    return model_analytic_metric(*in.model, tol);
  }
  if (name == "user") {
    if (!in.metric) throw Error(ErrorCode::invalid_argument, "no 'metric' in the input document");
    return {*in.metric, MetricMethod::user, validate_metric(in.h, *in.metric, tol)};
  }
  parse_fail("unknown metric method '" + name + "'");
}

Json eigenvalues_json(const ComplexMatrix& h, const Tolerances& tol) {
  Json out = Json::array();
  for (const auto& p : eigen_analysis(h, tol).pairs) out.push_back(to_json(p.value));
  return out;
}

Json describe_input(const Input& in, const Tolerances& tol) {
  Json out{{"eigenvalues", eigenvalues_json(in.h, tol)}};
  if (in.s) out["pseudo_hermitian_residual"] = check_pseudo_hermitian(in.h, *in.s, tol);
  if (in.model) {
    out["phase"] = std::string(to_string(in.model->phase));
    out["discriminant"] = in.model->discriminant;
  } else {
    out["phase"] = std::string(to_string(classify(in.h, tol).classification));
  }
  return out;
}

// ------------------------------------------------------------ output

struct Outcome {
  Json results;
  Json summary;  // stdout view; defaults to results
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

Json document(const std::string& name, const std::vector<std::string>& args, const Json& echo, const Json& results,
              const Tolerances& tol) {
  return {{"command", {{"name", name}, {"args", args}}},
          {"input", echo},
          {"input_digest", digest(echo)},
          {"results", results},
          {"tolerances", to_json(tol)},
          {"version", kVersion}};
}

void emit(const std::string& name, const std::vector<std::string>& args, const Json& echo, const Outcome& outcome,
          const Tolerances& tol, const std::string& out_dir, std::ostream& out) {
  const Json full = document(name, args, echo, outcome.results, tol);
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::invalid_argument, "cannot create output directory '" + out_dir + "'");
    auto write_file = [&](const std::string& file, const std::string& contents) {
      std::ofstream f(std::filesystem::path(out_dir) / file, std::ios::binary);
      if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + file + "' in '" + out_dir + "'");
      f << contents;
    };
    write_file("result.json", dump(full));
    for (const auto& [file, contents] : outcome.files) write_file(file, contents);
  }
  const Json& view = outcome.summary.is_null() ? outcome.results : outcome.summary;
  out << dump(document(name, args, echo, view, tol));
}

// ------------------------------------------------------------ commands

Outcome cmd_metric(const Input& in, const std::string& method, std::optional<Normalization> n, const Tolerances& tol) {
  if (method != "spectral" && method != "das" && method != "both") parse_fail("--method must be spectral, das or both");
  Outcome o;
  o.results = describe_input(in, tol);
  std::optional<MetricOperator> spectral, das;
  if (method != "das") spectral = spectral_for(in, n, tol);
  if (method != "spectral") das = das_for(in, tol);
  if (spectral) o.results["spectral"] = to_json(*spectral);
  if (das) o.results["das"] = to_json(*das);
  if (spectral && das) {
    const auto cmp = compare_metrics(das->matrix, spectral->matrix, tol);
    o.results["comparison"] = {{"a", "das"}, {"b", "spectral"}, {"factor", cmp.factor},
                               {"verdict", std::string(to_string(cmp.verdict))}};
  }
  return o;
}

Outcome cmd_validate(const Input& in, std::string method, std::optional<Normalization> n, const Tolerances& tol) {
  if (method.empty()) method = in.metric ? "user" : (in.model ? "analytic" : "spectral");
  Outcome o;
  o.results = describe_input(in, tol);
  const MetricOperator m = metric_by_name(in, method, n, tol);
  o.results["metric"] = to_json(m);
  o.results["valid"] = m.report.positive && m.report.hermitian_residual <= tol.herm &&
                       m.report.intertwining_residual <= tol.herm;
  return o;
}

Outcome cmd_compare(const Input& in, const std::string& a, const std::string& b, std::optional<Normalization> n,
                    const Tolerances& tol) {
  const MetricOperator ma = metric_by_name(in, a, n, tol);
  const MetricOperator mb = metric_by_name(in, b, n, tol);
  const auto cmp = compare_metrics(ma.matrix, mb.matrix, tol);
  Outcome o;
  o.results = {{"a", to_json(ma)}, {"b", to_json(mb)},
               {"comparison", {{"a", a}, {"b", b}, {"factor", cmp.factor}, {"verdict", std::string(to_string(cmp.verdict))}}}};
  return o;
}

Json brackets_json(const std::vector<EpBracket>& brackets) {
  Json out = Json::array();
  for (const auto& b : brackets) {
    out.push_back({{"at", to_json(b.at)}, {"axis", b.axis}, {"estimate", 0.5 * (b.lo + b.hi)},
                   {"from", std::string(to_string(b.from))}, {"hi", b.hi}, {"lo", b.lo},
                   {"to", std::string(to_string(b.to))}});
  }
  return out;
}

Outcome cmd_sweep(ModelFamily family, const ParamMap& base, const std::vector<std::string>& axis_specs,
                  unsigned threads, const Tolerances& tol) {
  if (axis_specs.empty()) throw UsageFailure(kExitPhase, "malformed_axis", "sweep needs at least one --axis");
  std::vector<Axis> axes;
  for (const auto& spec : axis_specs) {
    axes.push_back(parse_axis(spec));
    for (std::size_t k = 0; k + 1 < axes.size(); ++k) {
      if (axes[k].name == axes.back().name) {
        throw UsageFailure(kExitPhase, "malformed_axis", "axis '" + axes.back().name + "' given twice");
      }
    }
  }
  const PhaseDiagram d = sweep(family, base, axes, tol, threads);
  const auto brackets = ep_brackets(d);

  Json axes_json = Json::array();
  for (const auto& a : axes) axes_json.push_back({{"name", a.name}, {"values", a.values}});
  Json points = Json::array();
  std::map<std::string, int> counts{{"broken", 0}, {"error", 0}, {"exceptional", 0}, {"unbroken", 0}};
  for (const auto& p : d.points) {
    points.push_back(to_json(p));
    ++counts[p.error ? "error" : std::string(to_string(p.classification))];
  }
  Outcome o;
  o.summary = {{"axes", axes_json}, {"base", to_json(base)}, {"brackets", brackets_json(brackets)},
               {"counts", counts}, {"family", std::string(to_string(family))}, {"points", d.points.size()}};
  o.results = o.summary;
  o.results["points"] = points;
  std::ostringstream csv;
  write_phase_csv(csv, d);
  o.files.emplace_back("phase.csv", csv.str());
  return o;
}

Outcome cmd_ep(ModelFamily family, const ParamMap& base, const std::string& param, double lo, double hi,
               bool numeric, const Tolerances& tol) {
  if (param.empty()) parse_fail("ep needs --param");
  double value = 0.0;
  if (numeric) {
    value = find_exceptional(
        [&](double x) {
          ParamMap p = base;
          p[param] = x;
          return make_model(family, p).hamiltonian;
        },
        lo, hi, tol);
  } else {
    value = find_exceptional(family, base, param, lo, hi, tol);
  }
  ParamMap at = base;
  at[param] = value;
  const ModelInstance m = make_model(family, at);
  const EigenAnalysis analysis = eigen_analysis(m.hamiltonian, tol);
  Json values = Json::array();
  for (const auto& p : analysis.pairs) values.push_back(to_json(p.value));
  Outcome o;
  o.results = {{"defect_indicator", analysis.defect_indicator},
               {"discriminant", model_discriminant(family, at)},
               {"eigenvalues", values},
               {"family", std::string(to_string(family))},
               {"interval", {lo, hi}},
               {"method", numeric ? "numeric" : "discriminant"},
               {"param", param},
               {"params", to_json(m.params)},
               {"value", value}};
  return o;
}

ComplexVector parse_state(const std::string& text, std::size_t dim) {
  if (text.empty()) {
    ComplexVector v(dim);
    v[0] = 1.0;
    return v;
  }
  std::vector<Complex> entries;
  for (auto part : split(text, ',')) {
    const auto pieces = split(part, ':');
    const auto re = to_double(pieces[0]);
    const auto im = pieces.size() == 2 ? to_double(pieces[1]) : std::optional<double>(0.0);
    if (pieces.size() > 2 || !re || !im) parse_fail("--psi0 entries must be re or re:im, got '" + std::string(part) + "'");
    entries.emplace_back(*re, *im);
  }
  if (entries.size() != dim) parse_fail("--psi0 has " + std::to_string(entries.size()) + " entries, expected " + std::to_string(dim));
  ComplexVector v(std::move(entries));
  if (v.norm() == 0.0) parse_fail("--psi0 must be nonzero");
  return v;
}

Outcome cmd_evolve(const Input& in, const std::string& psi_text, double t_max, std::size_t steps, double hbar,
                   bool allow_broken, const Tolerances& tol) {
  if (steps < 2 || !(t_max > 0.0)) parse_fail("evolve needs --steps >= 2 and --t-max > 0");
  const ComplexVector psi0 = parse_state(psi_text, in.h.rows());
  const PhasePoint phase = classify(in.h, tol);
  const bool unbroken = phase.classification == Phase::unbroken;
  if (!unbroken && !allow_broken) {
    throw UsageFailure(kExitPhase, "broken_phase",
                       "Hamiltonian is " + std::string(to_string(phase.classification)) +
                           "; pass --allow-broken to evolve without a metric");
  }
  ComplexMatrix metric = ComplexMatrix::identity(in.h.rows());
  std::string metric_source = "identity";
  if (in.metric) {
    metric = *in.metric;
    metric_source = "user";
  } else if (unbroken) {
    metric = spectral_for(in, std::nullopt, tol).matrix;
    metric_source = "spectral";
  }
  const auto times = linspace(0.0, t_max, steps);
  const EvolutionRecord rec = evolve(in.h, psi0, times, metric, hbar, tol);
  const double metric_dev = max_relative_deviation(rec.metric_norms);
  const double standard_dev = max_relative_deviation(rec.standard_norms);

  Outcome o;
  o.summary = {{"classification", std::string(to_string(phase.classification))},
               {"max_imag_eigenvalue", phase.min_imag_gap},
               {"max_metric_norm_deviation", metric_dev},
               {"max_standard_norm_deviation", standard_dev},
               {"metric", to_json(metric)},
               {"metric_source", metric_source},
               {"psi0", to_json(psi0)},
               {"steps", steps},
               {"t_max", t_max}};
  char line[128];
  std::snprintf(line, sizeof line, "max metric-norm deviation %.3e, max standard-norm deviation %.3e", metric_dev,
                standard_dev);
  o.summary["summary"] = line;
  if (!unbroken) o.summary["growth_rate"] = growth_rate(rec, t_max / 2.0, t_max) * hbar;
  o.results = o.summary;
  Json series = Json::array();
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    series.push_back({{"metric_norm", rec.metric_norms[k]}, {"standard_norm", rec.standard_norms[k]},
                      {"state", to_json(rec.states[k])}, {"t", rec.times[k]}});
  }
  o.results["series"] = series;
  std::ostringstream csv;
  write_evolution_csv(csv, rec);
  o.files.emplace_back("evolution.csv", csv.str());
  return o;
}

Json report_json(const DiscriminationReport& r) {
  return {{"distinguishability_gain", r.distinguishability_gain},
          {"metric_overlap", to_json(r.metric_overlap)},
          {"standard_overlap", to_json(r.standard_overlap)}};
}

Outcome cmd_discriminate(const std::optional<Input>& in, double theta, double eps, double sin_theta,
                         std::size_t scan_count, const Tolerances& tol) {
  ComplexMatrix metric;
  Json source;
  if (in) {
    if (!in->model || in->model->family != ModelFamily::jc_full) {
      throw Error(ErrorCode::invalid_argument, "discriminate assembles its metric from a jc_full model (levels >= 2)");
    }
    metric = restrict_to_pair_basis(model_analytic_metric(*in->model, tol).matrix);
    source = "jc_full";
  } else {
    metric = discrimination_metric(sin_theta);
    source = {{"sin_theta1", sin_theta}};
  }
  const EntangledPair pair = build_entangled_pair(theta, eps);
  const DiscriminationReport r = discriminate(pair, metric, tol);
  Outcome o;
  o.summary = report_json(r);
  o.summary["eps"] = eps;
  o.summary["eps_warning"] = pair.eps_warning;
  o.summary["metric"] = to_json(metric);
  o.summary["metric_source"] = source;
  o.summary["standard_overlap_squared"] = std::norm(r.standard_overlap);
  o.summary["theta"] = theta;
  o.results = o.summary;
  if (scan_count > 0) {
    const auto thetas = linspace(0.0, std::numbers::pi / 2.0, scan_count);
    const OrthogonalityScan scan = orthogonality_scan(thetas, eps, metric, tol);
    Json rows = Json::array();
    for (const auto& row : scan.rows) {
      Json entry = report_json(row.report);
      entry["theta"] = row.theta;
      rows.push_back(entry);
    }
    o.summary["scan"] = {{"crossings", scan.crossings}, {"points", scan.rows.size()}};
    o.results["scan"] = {{"crossings", scan.crossings}, {"points", scan.rows.size()}, {"rows", rows}};
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    o.files.emplace_back("scan.csv", csv.str());
  }
  return o;
}

Outcome cmd_model_show(const Input& in, const Tolerances& tol) {
  if (!in.model) throw Error(ErrorCode::invalid_argument, "model show needs a model input");
  const ModelInstance& m = *in.model;
  Outcome o;
  Json analytic = Json::array();
  for (const auto& e : m.analytic_eigenvalues) analytic.push_back(to_json(e));
  o.results = {{"analytic_eigenvalues", analytic},
               {"discriminant", m.discriminant},
               {"eigenvalues", eigenvalues_json(m.hamiltonian, tol)},
               {"family", std::string(to_string(m.family))},
               {"hamiltonian", to_json(m.hamiltonian)},
               {"params", to_json(m.params)},
               {"phase", std::string(to_string(m.phase))},
               {"pseudo_hermitian_residual", check_pseudo_hermitian(m.hamiltonian, m.similarity, tol)},
               {"similarity", to_json(m.similarity)}};
  o.results["analytic_metric"] = m.analytic_metric ? to_json(*m.analytic_metric) : Json(nullptr);
  o.results["das_q0"] = m.das_data ? to_json(m.das_data->q0) : Json(nullptr);
  return o;
}

void report_error(std::ostream& err, const std::string& code, const std::string& message, int exit_code) {
  err << dump({{"error", {{"code", code}, {"exit_code", exit_code}, {"message", message}}}});
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::broken_phase: return kExitPhase;
    case ErrorCode::defective_system:
    case ErrorCode::defective_matrix: return kExitDefective;
    case ErrorCode::parse_error: return kExitParse;
    default: return kExitFailure;
  }
}

ParamMap parse_params(std::string_view text) {
  ParamMap out;
  if (trim(text).empty()) return out;
  for (auto part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) parse_fail("--params expects name=value, got '" + std::string(part) + "'");
    const std::string name(trim(part.substr(0, eq)));
    const auto value = to_double(part.substr(eq + 1));
    if (name.empty() || !value) parse_fail("--params entry '" + std::string(part) + "' is malformed");
    if (out.count(name)) parse_fail("--params repeats '" + name + "'");
    out[name] = *value;
  }
  return out;
}

Axis parse_axis(std::string_view text) {
  auto fail = [&](const std::string& why) -> Axis {
    throw UsageFailure(kExitPhase, "malformed_axis", "--axis '" + std::string(text) + "': " + why);
  };
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) return fail("expected name=start:stop:count");
  const std::string name(trim(text.substr(0, eq)));
  const auto pieces = split(text.substr(eq + 1), ':');
  if (name.empty() || pieces.size() != 3) return fail("expected name=start:stop:count");
  const auto start = to_double(pieces[0]);
  const auto stop = to_double(pieces[1]);
  const auto count = to_double(pieces[2]);
  if (!start || !stop) return fail("start and stop must be finite numbers");
  if (!count || *count < 1.0 || std::floor(*count) != *count || *count > 1e6) {
    return fail("count must be an integer between 1 and 1e6");
  }
  return {name, linspace(*start, *stop, static_cast<std::size_t>(*count))};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"metricforge: metric operators for pseudo-Hermitian Hamiltonians", "metricforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common c;
  std::string method = "spectral", metric_name, cmp_a = "das", cmp_b = "spectral", param, psi0;
  std::vector<std::string> axes;
  unsigned threads = 0;
  double lo = 0.0, hi = 1.0, t_max = 10.0, hbar = 1.0;
  double theta = std::numbers::pi / 3.0, eps = 0.05, sin_theta = 0.5;
  std::size_t steps = 101, scan = 0;
  bool allow_broken = false, numeric = false;

  auto* metric_cmd = app.add_subcommand("metric", "Construct metric operators");
  add_input_options(metric_cmd, c);
  add_output_options(metric_cmd, c);
  metric_cmd->add_option("--method", method, "spectral, das or both");
  metric_cmd->add_option("--normalization", c.normalization, "unit_left, unit_right or balanced");

  auto* validate_cmd = app.add_subcommand("validate", "Validate a metric against the Hamiltonian");
  add_input_options(validate_cmd, c);
  add_output_options(validate_cmd, c);
  validate_cmd->add_option("--metric", metric_name, "user, analytic, spectral or das");
  validate_cmd->add_option("--normalization", c.normalization, "unit_left, unit_right or balanced");

  auto* compare_cmd = app.add_subcommand("compare", "Compare two metric constructions");
  add_input_options(compare_cmd, c);
  add_output_options(compare_cmd, c);
  compare_cmd->add_option("--a", cmp_a, "First metric: das, spectral, analytic or user");
  compare_cmd->add_option("--b", cmp_b, "Second metric");
  compare_cmd->add_option("--normalization", c.normalization, "unit_left, unit_right or balanced");

  auto* sweep_cmd = app.add_subcommand("sweep", "Phase diagram over a parameter grid");
  add_input_options(sweep_cmd, c);
  add_output_options(sweep_cmd, c);
  sweep_cmd->add_option("--axis", axes, "name=start:stop:count (repeatable)");
  sweep_cmd->add_option("--threads", threads, "Worker threads, 0 for all cores");

  auto* ep_cmd = app.add_subcommand("ep", "Locate an exceptional point by bisection");
  add_input_options(ep_cmd, c);
  add_output_options(ep_cmd, c);
  ep_cmd->add_option("--param", param, "Parameter to bisect");
  ep_cmd->add_option("--lo", lo, "Lower end of the bracket");
  ep_cmd->add_option("--hi", hi, "Upper end of the bracket");
  ep_cmd->add_flag("--numeric", numeric, "Bisect on the numeric spectrum instead of the discriminant");

  auto* evolve_cmd = app.add_subcommand("evolve", "Time evolution with metric and standard norms");
  add_input_options(evolve_cmd, c);
  add_output_options(evolve_cmd, c);
  evolve_cmd->add_option("--psi0", psi0, "Initial state as re[:im],re[:im],...");
  evolve_cmd->add_option("--t-max", t_max, "Final time");
  evolve_cmd->add_option("--steps", steps, "Number of time points");
  evolve_cmd->add_option("--hbar", hbar, "Time unit scale");
  evolve_cmd->add_flag("--allow-broken", allow_broken, "Evolve outside the unbroken phase");

  auto* disc_cmd = app.add_subcommand("discriminate", "Entangled-state discrimination");
  add_input_options(disc_cmd, c);
  add_output_options(disc_cmd, c);
  disc_cmd->add_option("--theta", theta, "Mixing angle of the first state");
  disc_cmd->add_option("--eps", eps, "Angle offset of the second state");
  disc_cmd->add_option("--sin-theta", sin_theta, "Doublet-0 coupling when no model is given");
  disc_cmd->add_option("--scan", scan, "Points of an orthogonality scan over theta in [0, pi/2]");

  auto* model_cmd = app.add_subcommand("model", "Model utilities");
  model_cmd->require_subcommand(1);
  auto* show_cmd = model_cmd->add_subcommand("show", "Print a model instance");
  add_input_options(show_cmd, c);
  add_output_options(show_cmd, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "parse_error", e.what(), kExitParse);
    return kExitParse;
  }

  try {
    const Tolerances tol = load_tolerances(c.tols);
    const auto normalization = load_normalization(c.normalization);
    std::string name;
    Outcome outcome;
    Json echo;

    auto family_input = [&]() -> std::pair<ModelFamily, ParamMap> {
      if (!c.in_path.empty()) {
        const Input in = load_input(c);
        if (!in.model) throw Error(ErrorCode::invalid_argument, "this command needs a model input");
        return {in.model->family, in.model->params};
      }
      if (c.model.empty()) parse_fail("--model is required");
      return {parse_family(c.model), parse_params(c.params)};
    };

    if (metric_cmd->parsed()) {
      name = "metric";
      const Input in = load_input(c);
      echo = in.echo;
      outcome = cmd_metric(in, method, normalization, tol);
    } else if (validate_cmd->parsed()) {
      name = "validate";
      const Input in = load_input(c);
      echo = in.echo;
      outcome = cmd_validate(in, metric_name, normalization, tol);
    } else if (compare_cmd->parsed()) {
      name = "compare";
      const Input in = load_input(c);
      echo = in.echo;
      outcome = cmd_compare(in, cmp_a, cmp_b, normalization, tol);
    } else if (sweep_cmd->parsed()) {
      name = "sweep";
      const auto [family, base] = family_input();
      echo = {{"model", {{"family", std::string(to_string(family))}, {"params", to_json(base)}}}, {"axes", axes}};
      outcome = cmd_sweep(family, base, axes, threads, tol);
    } else if (ep_cmd->parsed()) {
      name = "ep";
      const auto [family, base] = family_input();
      echo = {{"model", {{"family", std::string(to_string(family))}, {"params", to_json(base)}}}};
      outcome = cmd_ep(family, base, param, lo, hi, numeric, tol);
    } else if (evolve_cmd->parsed()) {
      name = "evolve";
      const Input in = load_input(c);
      echo = in.echo;
      outcome = cmd_evolve(in, psi0, t_max, steps, hbar, allow_broken, tol);
    } else if (disc_cmd->parsed()) {
      name = "discriminate";
      std::optional<Input> in;
      if (!c.model.empty() || !c.in_path.empty()) in = load_input(c);
      echo = in ? in->echo : Json{{"sin_theta1", sin_theta}};
      outcome = cmd_discriminate(in, theta, eps, sin_theta, scan, tol);
    } else {
      name = "model show";
      const Input in = load_input(c);
      echo = in.echo;
      outcome = cmd_model_show(in, tol);
    }
    emit(name, args, echo, outcome, tol, c.out_dir, out);
    return kExitOk;
  } catch (const UsageFailure& e) {
    report_error(err, e.code(), e.what(), e.exit_code());
    return e.exit_code();
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    report_error(err, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what(), kExitFailure);
    return kExitFailure;
  }
}

}  // namespace metricforge::cli
