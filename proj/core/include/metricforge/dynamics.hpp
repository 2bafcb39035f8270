#pragma once

#include <span>
#include <vector>

#include "metricforge/linalg.hpp"
#include "metricforge/tolerances.hpp"

namespace metricforge {

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<ComplexVector> states;
  std::vector<double> metric_norms;    // sqrt(<psi|m|psi>)
  std::vector<double> standard_norms;  // ||psi||
};

/// psi(t) = exp(-i H t / hbar) psi0, evaluated independently at every time.
EvolutionRecord evolve(const ComplexMatrix& h, const ComplexVector& psi0, std::span<const double> times,
                       const ComplexMatrix& metric, double hbar = 1.0, const Tolerances& tol = {});

/// max_i |x_i - x_0| / x_0
double max_relative_deviation(std::span<const double> values);

/// Least-squares slope of log(standard_norm) against t over [t_from, t_to].
double growth_rate(const EvolutionRecord& record, double t_from, double t_to);

struct EntangledPair {
  ComplexVector psi1;
  ComplexVector psi2;
  double theta = 0.0;
  double eps = 0.0;
  bool eps_warning = false;  // eps above 0.1, outside the small-offset regime
};

/// States over the ordered basis {|0,+1/2>, |1,-1/2>, |0,-1/2>, |1,+1/2>}:
/// psi(a) = (cos(a/2), cos(a/2), sin(a/2), sin(a/2)) / sqrt(2), with
/// psi1 = psi(theta) and psi2 = psi(theta + 2 eps).
EntangledPair build_entangled_pair(double theta, double eps);

/// <a|m|b> / sqrt(<a|m|a> <b|m|b>)
Complex normalized_overlap(const ComplexVector& a, const ComplexVector& b, const ComplexMatrix& m);

struct DiscriminationReport {
  Complex standard_overlap;
  Complex metric_overlap;
  double distinguishability_gain = 0.0;  // |standard|^2 - |metric|^2
};

/// Throws NotPositive when the metric is not Hermitian positive definite.
DiscriminationReport discriminate(const EntangledPair& pair, const ComplexMatrix& metric,
                                  const Tolerances& tol = {});

/// Where each entangled-pair basis state sits in the jc_full basis
/// {|0,-1/2>, |0,+1/2>, |1,-1/2>, |1,+1/2>, |2,-1/2>, ...}.
inline constexpr std::size_t kPairBasisInFull[4] = {1, 2, 0, 3};

/// Restricts a jc_full metric (levels >= 2) to the entangled-pair basis.
ComplexMatrix restrict_to_pair_basis(const ComplexMatrix& full_metric);

/// The restricted metric for doublet-0 coupling sin_theta1:
/// blockdiag([[1, -s1], [-s1, 1]], 1, 1).
ComplexMatrix discrimination_metric(double sin_theta1);

struct ScanRow {
  double theta = 0.0;
  DiscriminationReport report;
};

struct OrthogonalityScan {
  std::vector<ScanRow> rows;
  std::vector<double> crossings;  // theta values where Re(metric_overlap) changes sign
};

/// discriminate at every theta; crossings are bisected on Re(metric_overlap)
/// where consecutive rows change sign and the overlap is real.
OrthogonalityScan orthogonality_scan(std::span<const double> thetas, double eps, const ComplexMatrix& metric,
                                     const Tolerances& tol = {});

}  // namespace metricforge
