#include "metricforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metricforge/errors.hpp"

namespace metricforge {
namespace {

bool finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(std::span<const Complex> values, const char* what) {
  for (const auto& z : values) {
    if (!finite(z)) throw Error(ErrorCode::non_finite, std::string(what) + " has a non-finite entry");
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(op) + ": shapes differ");
  }
}

void require_square(const ComplexMatrix& m, const char* op) {
  if (!m.is_square() || m.empty()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(op) + ": matrix must be square and non-empty");
  }
}

struct LuFactors {
  ComplexMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

LuFactors lu_factor(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "lu");
  const std::size_t n = m.rows();
  LuFactors f{m, std::vector<std::size_t>(n), 1};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  const double threshold = tol.singular * std::max(norm(m), std::numeric_limits<double>::min());
  auto& a = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best <= threshold) {
      throw Error(ErrorCode::singular_matrix,
                  "matrix is singular to working precision (pivot " + std::to_string(best) + ")");
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
      std::swap(f.perm[k], f.perm[pivot]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex factor = a(i, k) / a(k, k);
      a(i, k) = factor;
      if (factor == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return f;
}

}  // namespace

// ---------------------------------------------------------------- vectors

ComplexVector::ComplexVector(std::size_t dim) : entries_(dim) {}

ComplexVector::ComplexVector(std::vector<Complex> entries) : entries_(std::move(entries)) {
  require_finite(entries_, "vector");
}

ComplexVector::ComplexVector(std::initializer_list<Complex> entries) : entries_(entries) {
  require_finite(entries_, "vector");
}

double ComplexVector::norm() const noexcept {
  double sum = 0.0;
  for (const auto& z : entries_) sum += std::norm(z);
  return std::sqrt(sum);
}

ComplexVector ComplexVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "cannot normalize a zero vector");
  ComplexVector out = *this;
  out *= Complex(1.0 / n);
  return out;
}

ComplexVector& ComplexVector::operator+=(const ComplexVector& other) {
  if (dim() != other.dim()) throw Error(ErrorCode::dimension_mismatch, "vector +: dimensions differ");
  for (std::size_t i = 0; i < dim(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexVector& ComplexVector::operator-=(const ComplexVector& other) {
  if (dim() != other.dim()) throw Error(ErrorCode::dimension_mismatch, "vector -: dimensions differ");
  for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexVector& ComplexVector::operator*=(Complex scale) noexcept {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexVector operator+(ComplexVector a, const ComplexVector& b) { return a += b; }
ComplexVector operator-(ComplexVector a, const ComplexVector& b) { return a -= b; }
ComplexVector operator*(Complex scale, ComplexVector v) { return v *= scale; }

Complex dot(const ComplexVector& a, const ComplexVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::dimension_mismatch, "dot: dimensions differ");
  Complex sum{};
  for (std::size_t i = 0; i < a.dim(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

// ---------------------------------------------------------------- matrices

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::dimension_mismatch, "matrix entry count does not match rows x cols");
  }
  require_finite(data_, "matrix");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorCode::dimension_mismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_, "matrix");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  require_finite(m.data_, "matrix");
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const ComplexVector> columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().dim();
  ComplexMatrix m(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].dim() != n) throw Error(ErrorCode::dimension_mismatch, "columns differ in length");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t j) const {
  ComplexVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "matrix +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "matrix -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) noexcept {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::dimension_mismatch, "matrix *: inner dimensions differ");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != v.dim()) throw Error(ErrorCode::dimension_mismatch, "matrix * vector: dimensions differ");
  ComplexVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex sum{};
    for (std::size_t j = 0; j < m.cols(); ++j) sum += m(i, j) * v[j];
    out[i] = sum;
  }
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  }
  return out;
}

double norm(const ComplexMatrix& m) noexcept {
  double sum = 0.0;
  for (const auto& z : m.data()) sum += std::norm(z);
  return std::sqrt(sum);
}

Complex trace(const ComplexMatrix& m) {
  require_square(m, "trace");
  Complex sum{};
  for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, i);
  return sum;
}

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) {
  ComplexMatrix m(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  }
  return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  require_square(m, "hermitian_part");
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      out(i, j) = avg;
      out(j, i) = std::conj(avg);
    }
  }
  return out;
}

double anti_hermitian_norm(const ComplexMatrix& m) {
  require_square(m, "anti_hermitian_norm");
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) sum += std::norm(0.5 * (m(i, j) - std::conj(m(j, i))));
  }
  return std::sqrt(sum);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double best = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  }
  return best;
}

ComplexMatrix inverse(const ComplexMatrix& m, const Tolerances& tol) {
  const LuFactors f = lu_factor(m, tol);
  const std::size_t n = m.rows();
  const auto& a = f.lu;
  ComplexMatrix inv(n, n);
  std::vector<Complex> x(n);
  for (std::size_t col = 0; col < n; ++col) {
    // Solve L U x = P e_col.
    for (std::size_t i = 0; i < n; ++i) {
      Complex sum = f.perm[i] == col ? Complex(1.0) : Complex{};
      for (std::size_t k = 0; k < i; ++k) sum -= a(i, k) * x[k];
      x[i] = sum;
    }
    for (std::size_t i = n; i-- > 0;) {
      Complex sum = x[i];
      for (std::size_t k = i + 1; k < n; ++k) sum -= a(i, k) * x[k];
      x[i] = sum / a(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

Complex determinant(const ComplexMatrix& m) {
  Tolerances exact;
  exact.singular = 0.0;
  try {
    const LuFactors f = lu_factor(m, exact);
    Complex det = static_cast<double>(f.sign);
    for (std::size_t i = 0; i < m.rows(); ++i) det *= f.lu(i, i);
    return det;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return {};
    throw;
  }
}

// ---------------------------------------------------------------- Hermitian spectrum

std::vector<double> hermitian_spectrum(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "hermitian_spectrum");
  const double scale = norm(m);
  if (anti_hermitian_norm(m) > tol.herm * scale) {
    throw Error(ErrorCode::not_hermitian, "hermitian_spectrum: matrix is not Hermitian");
  }
  ComplexMatrix a = hermitian_part(m);
  const std::size_t n = a.rows();

  auto off_diagonal = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) sum += std::norm(a(i, j));
    }
    return std::sqrt(sum);
  };

  const double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal() <= eps * scale * 1e-2) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex g = a(p, q);
        const double mag = std::abs(g);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Phase-strip the pivot to a real 2x2 problem, then rotate.
        const Complex phase = g / mag;
        const double zeta = (aqq - app) / (2.0 * mag);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U restricted to (p, q) = [[c, s], [-s conj(phase), c conj(phase)]].
        const Complex u_qp = -s * std::conj(phase);
        const Complex u_qq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * c + akq * u_qp;
          a(k, q) = akp * s + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(u_qp) * aqk;
          a(q, k) = s * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
  std::sort(values.begin(), values.end());
  return values;
}

// ---------------------------------------------------------------- exponential

namespace {

double one_norm(const ComplexMatrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += std::abs(m(i, j));
    best = std::max(best, sum);
  }
  return best;
}

ComplexMatrix exp_taylor(const ComplexMatrix& a, const Tolerances& tol) {
  const std::size_t n = a.rows();
  const double a_norm = one_norm(a);
  int squarings = 0;
  if (a_norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(a_norm / 0.5)));
  const ComplexMatrix b = std::ldexp(1.0, -squarings) * a;

  ComplexMatrix sum = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  for (int k = 1; k <= 60; ++k) {
    term = (1.0 / k) * (term * b);
    sum += term;
    if (one_norm(term) <= tol.exp * one_norm(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

ComplexMatrix mat_exp(const ComplexMatrix& m, Complex scale, const Tolerances& tol) {
  require_square(m, "mat_exp");
  const ComplexMatrix a = scale * m;
  const std::size_t n = m.rows();
  if (norm(a) == 0.0) return ComplexMatrix::identity(n);

  try {
    const EigenAnalysis analysis = eigen_analysis(m, tol);
    if (analysis.defect_indicator >= tol.defect) {
      std::vector<ComplexVector> columns;
      columns.reserve(n);
      for (const auto& pair : analysis.pairs) columns.push_back(pair.right);
      const ComplexMatrix v = ComplexMatrix::from_columns(columns);
      const ComplexMatrix v_inv = inverse(v, tol);
      if (norm(v) * norm(v_inv) <= tol.cond_max) {
        ComplexMatrix scaled = v;
        for (std::size_t j = 0; j < n; ++j) {
          const Complex factor = std::exp(scale * analysis.pairs[j].value);
          for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= factor;
        }
        return scaled * v_inv;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_matrix && e.code() != ErrorCode::no_convergence &&
        e.code() != ErrorCode::defective_system && e.code() != ErrorCode::defective_matrix) {
      throw;
    }
  }
  return exp_taylor(a, tol);
}

}  // namespace metricforge
