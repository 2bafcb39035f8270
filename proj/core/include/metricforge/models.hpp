#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metricforge/linalg.hpp"
#include "metricforge/metric.hpp"

namespace metricforge {

enum class Phase { unbroken, broken, exceptional };
std::string_view to_string(Phase p) noexcept;

enum class ModelFamily { jc_doublet, jc_full, pt_matrix, dirac_scalar };
std::string_view to_string(ModelFamily f) noexcept;
/// Throws InvalidParams for an unknown family name.
ModelFamily parse_family(std::string_view name);

using ParamMap = std::map<std::string, double, std::less<>>;

/// Parameter names accepted by a family, with defaults where one exists.
///   jc_doublet:   n, eps, omega, rho, hbar = 1
///   jc_full:      levels, eps, omega, rho, hbar = 1
///   pt_matrix:    r, s, t, theta, phi = 0
///   dirac_scalar: m0, c = 1, hbar = 1, kx = 0, v0
struct ParamSpec {
  std::string name;
  std::optional<double> default_value;
};
const std::vector<ParamSpec>& family_params(ModelFamily f);

/// Fills defaults and validates ranges. Throws InvalidParams for unknown or
/// missing names and out-of-range values.
ParamMap complete_params(ModelFamily f, const ParamMap& params);

struct ModelEigenvector {
  Complex value;
  ComplexVector vector;
};

struct ModelInstance {
  ModelFamily family = ModelFamily::jc_doublet;
  ParamMap params;
  ComplexMatrix hamiltonian;
  ComplexMatrix similarity;  // S
  std::vector<Complex> analytic_eigenvalues;  // ascending (Re, Im)
  // Closed-form biorthonormal pairs in the normalization the analytic metric is
  // written in. Present only in the unbroken phase.
  std::vector<EigenPair> analytic_pairs;
  // Closed-form right eigenvectors in the broken phase.
  std::vector<ModelEigenvector> broken_eigenvectors;
  std::optional<ComplexMatrix> analytic_metric;
  std::optional<DasConstruction> das_data;
  Phase phase = Phase::unbroken;
  // Sign decides the phase: > 0 unbroken, < 0 broken, 0 exceptional.
  double discriminant = 0.0;
};

ModelInstance make_model(ModelFamily family, const ParamMap& params);
ModelInstance make_model(std::string_view family, const ParamMap& params);

/// Closed-form discriminant without building the model.
double model_discriminant(ModelFamily family, const ParamMap& params);

/// Numeric pipeline: eigendecompose, biorthonormalize, rescale to the analytic
/// pair norms, sum the left outer products.
MetricOperator model_spectral_metric(const ModelInstance& model, const Tolerances& tol = {});

/// Das construction with the model's q0 and generators. Throws BrokenPhase
/// outside the unbroken phase and InvalidConstruction when the model has no
/// generator set at these parameters.
MetricOperator model_das_metric(const ModelInstance& model, const Tolerances& tol = {});

MetricOperator model_analytic_metric(const ModelInstance& model, const Tolerances& tol = {});

}  // namespace metricforge
