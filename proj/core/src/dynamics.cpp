#include "metricforge/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "metricforge/errors.hpp"

namespace metricforge {

EvolutionRecord evolve(const ComplexMatrix& h, const ComplexVector& psi0, std::span<const double> times,
                       const ComplexMatrix& metric, double hbar, const Tolerances& tol) {
  if (!h.is_square() || h.rows() != psi0.dim() || metric.rows() != h.rows() || metric.cols() != h.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "evolve: Hamiltonian, state and metric dimensions differ");
  }
  if (!(hbar > 0.0)) throw Error(ErrorCode::invalid_argument, "evolve: hbar must be positive");
  EvolutionRecord rec;
  rec.times.assign(times.begin(), times.end());
  for (double t : times) {
    const ComplexMatrix u = mat_exp(h, Complex(0.0, -t / hbar), tol);
    ComplexVector psi = u * psi0;
    rec.metric_norms.push_back(std::sqrt(std::max(0.0, dot(psi, metric * psi).real())));
    rec.standard_norms.push_back(psi.norm());
    rec.states.push_back(std::move(psi));
  }
  return rec;
}

double max_relative_deviation(std::span<const double> values) {
  if (values.empty() || values.front() == 0.0) return 0.0;
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - values.front()));
  return worst / std::abs(values.front());
}

double growth_rate(const EvolutionRecord& record, double t_from, double t_to) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    const double t = record.times[i];
    if (t < t_from || t > t_to || !(record.standard_norms[i] > 0.0)) continue;
    const double y = std::log(record.standard_norms[i]);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++count;
  }
  if (count < 2) throw Error(ErrorCode::invalid_argument, "growth_rate: fewer than two samples in the window");
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::invalid_argument, "growth_rate: degenerate time window");
  return (n * sxy - sx * sy) / denom;
}

EntangledPair build_entangled_pair(double theta, double eps) {
  auto state = [](double angle) {
    const double c = std::cos(angle / 2.0) / std::sqrt(2.0);
    const double s = std::sin(angle / 2.0) / std::sqrt(2.0);
    return ComplexVector{c, c, s, s};
  };
  return {state(theta), state(theta + 2.0 * eps), theta, eps, std::abs(eps) > 0.1};
}

Complex normalized_overlap(const ComplexVector& a, const ComplexVector& b, const ComplexMatrix& m) {
  const double na = dot(a, m * a).real();
  const double nb = dot(b, m * b).real();
  return dot(a, m * b) / std::sqrt(na * nb);
}

DiscriminationReport discriminate(const EntangledPair& pair, const ComplexMatrix& metric, const Tolerances& tol) {
  if (metric.rows() != pair.psi1.dim() || metric.cols() != pair.psi1.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "discriminate: metric must match the pair basis");
  }
  const double m_norm = norm(metric);
  if (m_norm == 0.0 || anti_hermitian_norm(metric) > tol.herm * m_norm) {
    throw Error(ErrorCode::not_positive, "discriminate: metric is not Hermitian");
  }
  if (hermitian_spectrum(metric, tol).front() <= tol.pos * m_norm) {
    throw Error(ErrorCode::not_positive, "discriminate: metric is not positive definite");
  }
  DiscriminationReport r;
  r.standard_overlap = normalized_overlap(pair.psi1, pair.psi2, ComplexMatrix::identity(metric.rows()));
  r.metric_overlap = normalized_overlap(pair.psi1, pair.psi2, metric);
  r.distinguishability_gain = std::norm(r.standard_overlap) - std::norm(r.metric_overlap);
  return r;
}

ComplexMatrix restrict_to_pair_basis(const ComplexMatrix& full) {
  if (!full.is_square() || full.rows() < 5) {
    throw Error(ErrorCode::dimension_mismatch, "restrict_to_pair_basis: need a jc_full metric with levels >= 2");
  }
  ComplexMatrix out(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = full(kPairBasisInFull[i], kPairBasisInFull[j]);
  }
  return out;
}

ComplexMatrix discrimination_metric(double sin_theta1) {
  ComplexMatrix m = ComplexMatrix::identity(4);
  m(0, 1) = -sin_theta1;
  m(1, 0) = -sin_theta1;
  return m;
}

OrthogonalityScan orthogonality_scan(std::span<const double> thetas, double eps, const ComplexMatrix& metric,
                                     const Tolerances& tol) {
  OrthogonalityScan scan;
  for (double theta : thetas) scan.rows.push_back({theta, discriminate(build_entangled_pair(theta, eps), metric, tol)});
  auto real_overlap = [&](double theta) {
    return discriminate(build_entangled_pair(theta, eps), metric, tol).metric_overlap.real();
  };
  for (std::size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    const Complex a = scan.rows[i].report.metric_overlap;
    const Complex b = scan.rows[i + 1].report.metric_overlap;
    const bool aligned = std::abs(a.imag()) <= tol.real && std::abs(b.imag()) <= tol.real;
    if (!aligned || (a.real() > 0.0) == (b.real() > 0.0)) continue;
    double lo = scan.rows[i].theta, hi = scan.rows[i + 1].theta;
    double f_lo = a.real();
    const double width = tol.ep * std::max(1.0, std::abs(hi - lo));
    while (hi - lo > width) {
      const double mid = 0.5 * (lo + hi);
      const double f = real_overlap(mid);
      if ((f > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = f;
      } else {
        hi = mid;
      }
    }
    scan.crossings.push_back(0.5 * (lo + hi));
  }
  return scan;
}

}  // namespace metricforge
