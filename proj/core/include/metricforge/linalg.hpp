#pragma once

// Dense complex linear algebra used by every other module: matrix and vector
// value types, adjoints, LU inversion, the general complex eigensolver, the
// Hermitian spectrum, and the matrix exponential.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "metricforge/tolerances.hpp"

namespace metricforge {

using Complex = std::complex<double>;

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t dim);
  explicit ComplexVector(std::vector<Complex> entries);
  ComplexVector(std::initializer_list<Complex> entries);

  std::size_t dim() const noexcept { return entries_.size(); }
  Complex& operator[](std::size_t i) noexcept { return entries_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return entries_[i]; }
  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<Complex> entries() noexcept { return entries_; }

  double norm() const noexcept;
  ComplexVector normalized() const;

  ComplexVector& operator+=(const ComplexVector& other);
  ComplexVector& operator-=(const ComplexVector& other);
  ComplexVector& operator*=(Complex scale) noexcept;

  friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

 private:
  std::vector<Complex> entries_;
};

ComplexVector operator+(ComplexVector a, const ComplexVector& b);
ComplexVector operator-(ComplexVector a, const ComplexVector& b);
ComplexVector operator*(Complex scale, ComplexVector v);

/// <a|b>, conjugate-linear in the first slot.
Complex dot(const ComplexVector& a, const ComplexVector& b);

/// Dense row-major complex matrix. Entries are finite by construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> values);
  static ComplexMatrix from_columns(std::span<const ComplexVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const Complex> data() const noexcept { return data_; }
  ComplexVector column(std::size_t j) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale) noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v);

ComplexMatrix adjoint(const ComplexMatrix& m);
/// Frobenius norm.
double norm(const ComplexMatrix& m) noexcept;
Complex trace(const ComplexMatrix& m);
/// |a><b|
ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b);
/// (m + m^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);
/// ||(m - m^dagger) / 2||
double anti_hermitian_norm(const ComplexMatrix& m);
/// Largest entrywise modulus of a - b.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Inverse by partial-pivot LU. Throws SingularMatrix when a pivot falls below
/// tol.singular * ||m||.
ComplexMatrix inverse(const ComplexMatrix& m, const Tolerances& tol = {});
Complex determinant(const ComplexMatrix& m);

struct EigenPair {
  Complex value;
  ComplexVector right;  // M right = value right
  ComplexVector left;   // M^dagger left = conj(value) left
};

/// Raw eigensystem plus the conditioning of its eigenvector pairs.
struct EigenAnalysis {
  std::vector<EigenPair> pairs;  // unit right and left vectors, ascending (Re, Im)
  // min over pairs of |<l|r>| / (||l|| ||r||) after joint biorthogonalization of
  // eigenvalue clusters; zero when a cluster is rank deficient.
  double defect_indicator = 0.0;
};

/// Eigenpairs of a square matrix without the defectiveness check.
EigenAnalysis eigen_analysis(const ComplexMatrix& m, const Tolerances& tol = {});

/// Eigenpairs of a square matrix. Throws NoConvergence when the QR iteration
/// stalls and DefectiveMatrix when a left/right pair is (nearly) orthogonal.
std::vector<EigenPair> eigendecompose(const ComplexMatrix& m, const Tolerances& tol = {});

/// Single-link clusters of `values`: two indices share a cluster when a chain
/// of values at most `radius` apart connects them. Clusters are ordered by
/// their smallest index and list members ascending.
std::vector<std::vector<std::size_t>> eigenvalue_clusters(std::span<const Complex> values,
                                                          double radius);

/// Left vectors rescaled (jointly inside eigenvalue clusters) so that
/// <dual_m|right_n> = delta_mn. Throws DefectiveSystem when a cluster Gram
/// matrix is singular or a pair overlap is below tol.defect.
std::vector<ComplexVector> biorthogonal_duals(std::span<const EigenPair> pairs,
                                              double matrix_scale,
                                              const Tolerances& tol = {});

/// Real eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi.
/// Throws NotHermitian when ||m - m^dagger|| > tol.herm * ||m||.
std::vector<double> hermitian_spectrum(const ComplexMatrix& m, const Tolerances& tol = {});

/// exp(scale * m).
ComplexMatrix mat_exp(const ComplexMatrix& m, Complex scale, const Tolerances& tol = {});

}  // namespace metricforge
