#pragma once

// Shared helpers for the test binaries: random matrices, random model
// parameter draws on either side of the exceptional surface, and the
// V D V^-1 construction used as an independent metric oracle.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "metricforge/linalg.hpp"
#include "metricforge/models.hpp"

namespace metricforge::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex random_complex(std::mt19937_64& rng) { return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}; }

inline ComplexVector random_vector(std::mt19937_64& rng, std::size_t n) {
  ComplexVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = random_complex(rng);
  return v;
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_complex(rng);
  }
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  return hermitian_part(random_matrix(rng, n));
}

// Gram-Schmidt on a random complex matrix.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
  std::vector<ComplexVector> cols;
  while (cols.size() < n) {
    ComplexVector v = random_vector(rng, n);
    for (const auto& u : cols) v -= dot(u, v) * u;
    if (v.norm() > 1e-3) cols.push_back(v.normalized());
  }
  return ComplexMatrix::from_columns(cols);
}

/// H = V diag(D) V^-1 with distinct real D, and the oracle metric (V^-1)^dagger V^-1.
struct PseudoHermitianDraw {
  ComplexMatrix h;
  ComplexMatrix v;
  std::vector<double> spectrum;
  ComplexMatrix oracle_metric;
};

inline PseudoHermitianDraw random_pseudo_hermitian(std::mt19937_64& rng, std::size_t n) {
  PseudoHermitianDraw d;
  // Spread the eigenvalues so no two sit closer than 0.2.
  double e = uniform(rng, -2.0, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    d.spectrum.push_back(e);
    e += uniform(rng, 0.2, 1.0);
  }
  std::shuffle(d.spectrum.begin(), d.spectrum.end(), rng);
  // Identity plus a bounded perturbation keeps V well conditioned.
  d.v = ComplexMatrix::identity(n) + Complex(0.6) * random_matrix(rng, n);
  const ComplexMatrix v_inv = inverse(d.v);
  std::vector<Complex> diag(d.spectrum.begin(), d.spectrum.end());
  d.h = d.v * ComplexMatrix::diagonal(diag) * v_inv;
  d.oracle_metric = adjoint(v_inv) * v_inv;
  return d;
}

/// u in [0, 1) places the draw inside the unbroken region, u > 1 inside the
/// broken region; u is the ratio of the coupling to its critical value.
inline ParamMap jc_params(std::mt19937_64& rng, double u) {
  const double omega = uniform(rng, 0.3, 3.0);
  const double hbar = uniform(rng, 0.5, 2.0);
  double eps = uniform(rng, -2.0, 4.0);
  if (std::abs(hbar * omega - eps) < 0.1) eps += 0.3;
  const double n = std::floor(uniform(rng, 0.0, 6.0));
  const double rho = u * std::abs(hbar * omega - eps) / (2.0 * std::sqrt(n + 1.0));
  return {{"eps", eps}, {"hbar", hbar}, {"n", n}, {"omega", omega}, {"rho", uniform(rng, 0.0, 1.0) < 0.5 ? rho : -rho}};
}

inline ParamMap jc_full_params(std::mt19937_64& rng, double u) {
  ParamMap p = jc_params(rng, 0.0);
  p.erase("n");
  const double levels = std::floor(uniform(rng, 1.0, 7.0));
  // The last doublet has the largest coupling and sets the phase.
  p["levels"] = levels;
  p["rho"] = u * std::abs(p["hbar"] * p["omega"] - p["eps"]) / (2.0 * std::sqrt(levels));
  return p;
}

inline ParamMap pt_params(std::mt19937_64& rng, double u) {
  const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
  const double s = sign * uniform(rng, 0.1, 3.0);
  const double t = sign * uniform(rng, 0.1, 3.0);
  double theta = uniform(rng, 0.2, std::numbers::pi - 0.2);
  if (uniform(rng, 0.0, 1.0) < 0.5) theta = -theta;
  const double r = u * std::sqrt(s * t) / std::abs(std::sin(theta));
  return {{"phi", uniform(rng, -std::numbers::pi, std::numbers::pi)}, {"r", r}, {"s", s}, {"t", t}, {"theta", theta}};
}

inline ParamMap dirac_params(std::mt19937_64& rng, double u) {
  const double m0 = uniform(rng, 0.0, 2.0);
  const double c = uniform(rng, 0.5, 2.0);
  const double hbar = uniform(rng, 0.5, 2.0);
  double kx = uniform(rng, -2.0, 2.0);
  const double mc2 = m0 * c * c;
  if (std::hypot(c * hbar * kx, mc2) < 0.1) kx += 0.5;
  const double scale = std::hypot(c * hbar * kx, mc2);
  const double v0 = (uniform(rng, 0.0, 1.0) < 0.5 ? -u : u) * scale;
  return {{"c", c}, {"hbar", hbar}, {"kx", kx}, {"m0", m0}, {"v0", v0}};
}

inline ParamMap random_params(std::mt19937_64& rng, ModelFamily family, double u) {
  switch (family) {
    case ModelFamily::jc_doublet: return jc_params(rng, u);
    case ModelFamily::jc_full: return jc_full_params(rng, u);
    case ModelFamily::pt_matrix: return pt_params(rng, u);
    case ModelFamily::dirac_scalar: return dirac_params(rng, u);
  }
  return {};
}

inline constexpr ModelFamily kFamilies[] = {ModelFamily::jc_doublet, ModelFamily::jc_full, ModelFamily::pt_matrix,
                                            ModelFamily::dirac_scalar};

inline ModelInstance random_unbroken(std::mt19937_64& rng, ModelFamily family) {
  return make_model(family, random_params(rng, family, uniform(rng, 0.0, 0.95)));
}

inline ModelInstance random_broken(std::mt19937_64& rng, ModelFamily family) {
  return make_model(family, random_params(rng, family, uniform(rng, 1.05, 3.0)));
}

}  // namespace metricforge::testing
