#include "metricforge/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metricforge/errors.hpp"

namespace metricforge {
namespace {

void require_square_same(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (!a.is_square() || a.empty() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(op) + ": matrices must be square and of equal size");
  }
}

double relative(double value, double scale) { return scale == 0.0 ? value : value / scale; }

}  // namespace

double check_pseudo_hermitian(const ComplexMatrix& h, const ComplexMatrix& s, const Tolerances& tol) {
  require_square_same(h, s, "check_pseudo_hermitian");
  (void)inverse(s, tol);
  const double denom = norm(s) * norm(h);
  const double residual = norm(s * h - adjoint(h) * s);
  return relative(residual, denom);
}

std::string_view to_string(Normalization n) noexcept {
  switch (n) {
    case Normalization::unit_left: return "unit_left";
    case Normalization::unit_right: return "unit_right";
    case Normalization::balanced: return "balanced";
  }
  return "unknown";
}

std::optional<Normalization> parse_normalization(std::string_view text) noexcept {
  for (auto n : {Normalization::unit_left, Normalization::unit_right, Normalization::balanced}) {
    if (text == to_string(n)) return n;
  }
  return std::nullopt;
}

BiorthSystem biorthonormalize(std::span<const EigenPair> raw, Normalization normalization,
                              const Tolerances& tol, std::optional<double> matrix_scale) {
  if (raw.empty()) throw Error(ErrorCode::invalid_argument, "biorthonormalize: no eigenpairs");
  const std::size_t dim = raw.front().right.dim();
  std::vector<EigenPair> unit;
  unit.reserve(raw.size());
  double largest = 0.0;
  for (const auto& p : raw) {
    if (p.right.dim() != dim || p.left.dim() != dim) {
      throw Error(ErrorCode::dimension_mismatch, "biorthonormalize: eigenvector dimensions differ");
    }
    const double rn = p.right.norm();
    if (rn == 0.0) throw Error(ErrorCode::defective_system, "biorthonormalize: zero right eigenvector");
    unit.push_back({p.value, (1.0 / rn) * p.right, p.left});
    largest = std::max(largest, std::abs(p.value));
  }
  double scale = matrix_scale.value_or(largest);
  if (scale == 0.0) scale = 1.0;
  const auto duals = biorthogonal_duals(unit, scale, tol);

  BiorthSystem sys;
  sys.dim = dim;
  sys.pairs.reserve(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const double k = duals[i].norm();
    double right_scale = 1.0;
    switch (normalization) {
      case Normalization::unit_right: right_scale = 1.0; break;
      case Normalization::unit_left: right_scale = k; break;
      case Normalization::balanced: right_scale = std::sqrt(k); break;
    }
    sys.pairs.push_back({unit[i].value, right_scale * unit[i].right, (1.0 / right_scale) * duals[i]});
  }
  return sys;
}

BiorthResiduals biorth_residuals(const BiorthSystem& sys) {
  BiorthResiduals out;
  const std::size_t n = sys.pairs.size();
  ComplexMatrix completeness(sys.dim, sys.dim);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex g = dot(sys.pairs[m].left, sys.pairs[k].right);
      out.gram = std::max(out.gram, std::abs(g - (m == k ? 1.0 : 0.0)));
    }
    completeness += outer(sys.pairs[m].right, sys.pairs[m].left);
  }
  out.completeness = max_abs_diff(completeness, ComplexMatrix::identity(sys.dim));
  return out;
}

BiorthSystem match_normalization(const BiorthSystem& sys, std::span<const EigenPair> reference) {
  if (reference.empty()) return sys;
  BiorthSystem out = sys;
  for (auto& p : out.pairs) {
    const EigenPair* best = &reference.front();
    for (const auto& r : reference) {
      if (std::abs(r.value - p.value) < std::abs(best->value - p.value)) best = &r;
    }
    const double current = p.right.norm();
    if (current == 0.0) continue;
    const double k = best->right.norm() / current;
    p.right *= k;
    p.left *= 1.0 / k;
  }
  return out;
}

std::string_view to_string(MetricMethod m) noexcept {
  switch (m) {
    case MetricMethod::spectral: return "spectral";
    case MetricMethod::das: return "das";
    case MetricMethod::analytic: return "analytic";
    case MetricMethod::user: return "user";
  }
  return "unknown";
}

ValidityReport validate_metric(const ComplexMatrix& h, const ComplexMatrix& m, const Tolerances& tol) {
  require_square_same(h, m, "validate_metric");
  ValidityReport report;
  const double m_norm = norm(m);
  const double h_norm = norm(h);
  report.hermitian_residual = relative(anti_hermitian_norm(m), m_norm);
  Tolerances loose = tol;
  loose.herm = std::numeric_limits<double>::infinity();
  report.min_metric_eigenvalue = hermitian_spectrum(hermitian_part(m), loose).front();
  report.intertwining_residual = relative(norm(m * h - adjoint(h) * m), m_norm * h_norm);
  report.positive = m_norm > 0.0 && report.min_metric_eigenvalue > tol.pos * m_norm;
  return report;
}

MetricOperator spectral_metric(const BiorthSystem& sys, const ComplexMatrix& h, const Tolerances& tol) {
  if (!h.is_square() || h.rows() != sys.dim || sys.pairs.size() != sys.dim) {
    throw Error(ErrorCode::dimension_mismatch, "spectral_metric: system does not match the Hamiltonian");
  }
  const double h_norm = norm(h);
  for (const auto& p : sys.pairs) {
    if (std::abs(p.value.imag()) > tol.real * h_norm) {
      throw Error(ErrorCode::broken_phase,
                  "spectral_metric: complex eigenvalue (Im = " + std::to_string(p.value.imag()) +
                      "); no positive metric in the broken phase");
    }
  }
  MetricOperator out;
  out.matrix = ComplexMatrix(sys.dim, sys.dim);
  for (const auto& p : sys.pairs) out.matrix += outer(p.left, p.left);
  out.method = MetricMethod::spectral;
  out.report = validate_metric(h, out.matrix, tol);
  return out;
}

MetricOperator das_metric(const DasConstruction& c, const ComplexMatrix& h, const Tolerances& tol) {
  if (!h.is_square() || h.empty()) {
    throw Error(ErrorCode::dimension_mismatch, "das_metric: Hamiltonian must be square");
  }
  const std::size_t n = h.rows();
  const std::size_t count = c.generators.size();
  if (count == 0 || c.projectors.size() != count || c.phases.size() != count) {
    throw Error(ErrorCode::invalid_construction,
                "das_metric: generators, projectors and phases must be non-empty and of equal length");
  }
  auto require_dim = [n](const ComplexMatrix& m, const char* what) {
    if (m.rows() != n || m.cols() != n) {
      throw Error(ErrorCode::invalid_construction, std::string("das_metric: ") + what + " has the wrong size");
    }
  };
  require_dim(c.q0, "q0");

  ComplexMatrix sum(n, n);
  double largest = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& p = c.projectors[i];
    require_dim(p, "projector");
    require_dim(c.generators[i].sigma, "sigma");
    const double pn = norm(p);
    largest = std::max(largest, pn);
    if (norm(p * p - p) > tol.biorth * std::max(1.0, pn * pn)) {
      throw Error(ErrorCode::invalid_construction, "das_metric: projector " + std::to_string(i) + " is not idempotent");
    }
    if (std::abs(std::abs(c.phases[i]) - 1.0) > tol.biorth) {
      throw Error(ErrorCode::invalid_construction, "das_metric: phase " + std::to_string(i) + " is not unimodular");
    }
    sum += p;
  }
  if (norm(sum - ComplexMatrix::identity(n)) > tol.biorth * largest) {
    throw Error(ErrorCode::invalid_construction, "das_metric: projectors do not resolve the identity");
  }

  const double h_norm = norm(h);
  std::vector<ComplexMatrix> sigma_inv;
  sigma_inv.reserve(count);
  for (const auto& g : c.generators) sigma_inv.push_back(inverse(g.sigma, tol));

  ComplexMatrix q(n, n);
  for (std::size_t i = 0; i < count; ++i) {
    const Complex target = std::conj(c.generators[i].energy);
    // A real energy is its own partner, even inside a degenerate level.
    std::size_t partner = i;
    double best = std::abs(c.generators[i].energy - target);
    for (std::size_t j = 0; j < count && best > tol.match * h_norm; ++j) {
      const double d = std::abs(c.generators[j].energy - target);
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    if (best > tol.match * h_norm) {
      throw Error(ErrorCode::invalid_construction,
                  "das_metric: no generator for the conjugate of energy " + std::to_string(i));
    }
    q += adjoint(sigma_inv[partner]) * c.q0 * sigma_inv[i] * c.projectors[i];
  }

  const double q_norm = norm(q);
  if (anti_hermitian_norm(q) > tol.herm * q_norm) {
    throw Error(ErrorCode::not_hermitian,
                "das_metric: assembled operator is not Hermitian (relative anti-Hermitian part " +
                    std::to_string(relative(anti_hermitian_norm(q), q_norm)) + ")");
  }
  MetricOperator out;
  out.matrix = hermitian_part(q);
  out.method = MetricMethod::das;
  out.report = validate_metric(h, out.matrix, tol);
  return out;
}

Complex metric_inner_product(const ComplexVector& a, const ComplexVector& b, const ComplexMatrix& m) {
  return dot(a, m * b);
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::equal: return "equal";
    case Verdict::proportional: return "proportional";
    case Verdict::distinct: return "distinct";
  }
  return "unknown";
}

MetricComparison compare_metrics(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "compare_metrics: shapes differ");
  }
  const double a_norm = norm(a);
  const double b_norm = norm(b);
  if (norm(a - b) <= tol.cmp * a_norm || (a_norm == 0.0 && b_norm == 0.0)) {
    return {Verdict::equal, 1.0};
  }
  if (b_norm == 0.0) return {Verdict::distinct, 0.0};
  const ComplexMatrix b_adj = adjoint(b);
  const Complex f = trace(b_adj * a) / trace(b_adj * b);
  if (std::abs(f.imag()) > tol.cmp * std::abs(f) || f.real() <= 0.0) return {Verdict::distinct, f.real()};
  if (norm(a - f.real() * b) <= tol.cmp * a_norm) return {Verdict::proportional, f.real()};
  return {Verdict::distinct, f.real()};
}

ComplexMatrix spectral_projector(const EigenPair& pair) {
  const Complex overlap = dot(pair.left, pair.right);
  if (overlap == Complex{}) {
    throw Error(ErrorCode::defective_system, "spectral_projector: left and right vectors are orthogonal");
  }
  return (1.0 / overlap) * outer(pair.right, pair.left);
}

Complex sign_fixing_phase(const ComplexMatrix& s, const ComplexVector& psi) {
  return metric_inner_product(psi, psi, s).real() >= 0.0 ? 1.0 : -1.0;
}

ComplexMatrix reference_metric(const ComplexMatrix& s, const ComplexVector& psi, const Tolerances& tol) {
  const Complex v = metric_inner_product(psi, psi, s);
  const double psi_norm = psi.norm();
  if (std::abs(v) <= tol.biorth * norm(s) * psi_norm * psi_norm) {
    throw Error(ErrorCode::invalid_construction, "reference_metric: reference state has zero S-norm");
  }
  return (sign_fixing_phase(s, psi) / std::abs(v)) * s;
}

ComplexMatrix commuting_operator(std::span<const Complex> phases, std::span<const ComplexMatrix> projectors) {
  if (phases.size() != projectors.size() || projectors.empty()) {
    throw Error(ErrorCode::invalid_construction, "commuting_operator: phases and projectors differ in length");
  }
  ComplexMatrix a(projectors.front().rows(), projectors.front().cols());
  for (std::size_t i = 0; i < phases.size(); ++i) a += phases[i] * projectors[i];
  return a;
}

}  // namespace metricforge
