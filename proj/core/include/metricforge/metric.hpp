#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "metricforge/linalg.hpp"
#include "metricforge/tolerances.hpp"

namespace metricforge {

/// ||S H - H^dagger S|| / (||S|| ||H||). Throws SingularMatrix when S is not invertible.
double check_pseudo_hermitian(const ComplexMatrix& h, const ComplexMatrix& s,
                              const Tolerances& tol = {});

/// How a biorthonormal pair is scaled. <left|right> = 1 in every case.
enum class Normalization {
  unit_left,   // ||left|| = 1
  unit_right,  // ||right|| = 1
  balanced,    // ||left|| = ||right||
};

std::string_view to_string(Normalization n) noexcept;
std::optional<Normalization> parse_normalization(std::string_view text) noexcept;

struct BiorthSystem {
  std::vector<EigenPair> pairs;
  std::size_t dim = 0;
};

struct BiorthResiduals {
  double gram = 0.0;          // max |<left_m|right_n> - delta_mn|
  double completeness = 0.0;  // max entry of |sum |right><left| - I|
};

/// Rescales raw eigenpairs into a biorthonormal system. Clusters are formed with
/// radius tol.cluster * matrix_scale; when matrix_scale is not given the largest
/// eigenvalue modulus is used. Throws DefectiveSystem at exceptional points.
BiorthSystem biorthonormalize(std::span<const EigenPair> raw,
                              Normalization normalization = Normalization::unit_left,
                              const Tolerances& tol = {},
                              std::optional<double> matrix_scale = std::nullopt);

BiorthResiduals biorth_residuals(const BiorthSystem& sys);

/// Rescales each pair (right by k, left by 1/k) so that ||right|| equals the
/// right-vector norm of the reference pair with the nearest eigenvalue.
BiorthSystem match_normalization(const BiorthSystem& sys, std::span<const EigenPair> reference);

enum class MetricMethod { spectral, das, analytic, user };
std::string_view to_string(MetricMethod m) noexcept;

struct ValidityReport {
  double hermitian_residual = 0.0;  // ||(m - m^dagger)/2|| / ||m||
  double min_metric_eigenvalue = 0.0;
  double intertwining_residual = 0.0;  // ||m H - H^dagger m|| / (||m|| ||H||)
  bool positive = false;
};

struct MetricOperator {
  ComplexMatrix matrix;
  MetricMethod method = MetricMethod::user;
  ValidityReport report;
};

/// Residuals and positivity of a candidate metric. positive requires the
/// smallest eigenvalue of the Hermitian part to exceed tol.pos * ||m||.
ValidityReport validate_metric(const ComplexMatrix& h, const ComplexMatrix& m,
                               const Tolerances& tol = {});

/// sum_n |left_n><left_n|. Throws BrokenPhase if any |Im E| > tol.real * ||H||.
MetricOperator spectral_metric(const BiorthSystem& sys, const ComplexMatrix& h,
                               const Tolerances& tol = {});

struct DasGenerator {
  Complex energy;
  ComplexMatrix sigma;  // maps the reference state onto the eigenstate of `energy`
};

struct DasConstruction {
  ComplexMatrix q0;
  std::vector<DasGenerator> generators;
  std::vector<ComplexMatrix> projectors;  // projectors[i] belongs to generators[i]
  std::vector<Complex> phases;            // c_E, unit modulus
};

/// sum_E (sigma_{E*}^dagger)^-1 q0 sigma_E^-1 P_E, Hermitized.
/// Throws InvalidConstruction when the projectors or phases are inconsistent,
/// SingularMatrix for a non-invertible sigma and NotHermitian when the raw
/// assembly is not Hermitian within tol.herm.
MetricOperator das_metric(const DasConstruction& construction, const ComplexMatrix& h,
                          const Tolerances& tol = {});

/// a^dagger m b
Complex metric_inner_product(const ComplexVector& a, const ComplexVector& b, const ComplexMatrix& m);

enum class Verdict { equal, proportional, distinct };
std::string_view to_string(Verdict v) noexcept;

struct MetricComparison {
  Verdict verdict = Verdict::distinct;
  double factor = 0.0;  // a = factor * b when equal or proportional
};

MetricComparison compare_metrics(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const Tolerances& tol = {});

/// |right><left| / <left|right>
ComplexMatrix spectral_projector(const EigenPair& pair);

/// Sign of <psi|S|psi>, as a unit complex number.
Complex sign_fixing_phase(const ComplexMatrix& s, const ComplexVector& psi);

/// c S / |<psi|S|psi>|, so that <psi|q0|psi> = 1. Throws InvalidConstruction
/// when psi is S-null.
ComplexMatrix reference_metric(const ComplexMatrix& s, const ComplexVector& psi,
                               const Tolerances& tol = {});

/// A = sum_E c_E P_E
ComplexMatrix commuting_operator(std::span<const Complex> phases,
                                 std::span<const ComplexMatrix> projectors);

}  // namespace metricforge
