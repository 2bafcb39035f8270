#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace metricforge {

/// Numerical thresholds shared by every module. All values are relative to
/// the norm of the operator they are applied to unless noted otherwise.
struct Tolerances {
  double eig = 1e-8;        // eigenpair residual, relative to ||M||
  double inv = 1e-10;       // ||M * M^-1 - I||
  double herm = 1e-10;      // anti-Hermitian part, relative to ||M||
  double defect = 1e-8;     // |<l|r>| for unit vectors; below this the pair is defective
  double exp = 1e-12;       // Taylor truncation in mat_exp
  double cluster = 1e-7;    // eigenvalues closer than this (times ||M||) are treated jointly
  double match = 1e-8;      // left/right eigenvalue matching
  double singular = 1e-13;  // LU pivot threshold, relative to ||M||
  double real = 1e-9;       // |Im E| threshold for a real eigenvalue, relative to ||H||
  double pos = 1e-12;       // minimum metric eigenvalue, relative to ||metric||
  double biorth = 1e-10;    // biorthonormality / completeness residuals
  double cmp = 1e-9;        // metric comparison
  double ep = 1e-10;        // bisection bracket width, relative to (hi - lo)
  double cond_max = 1e8;    // eigenvector conditioning limit for the diagonal exp path
  double max_qr_iters_per_dim = 100;
};

/// Sets a tolerance by name. Returns false when the name is unknown.
bool set_tolerance(Tolerances& tol, std::string_view name, double value);

/// All tolerances as (name, value) pairs in a fixed order.
std::vector<std::pair<std::string, double>> tolerance_entries(const Tolerances& tol);

}  // namespace metricforge
