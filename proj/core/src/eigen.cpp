#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "metricforge/errors.hpp"
#include "metricforge/linalg.hpp"

namespace metricforge {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct RawPair {
  Complex value;
  ComplexVector vector;
};

// Rotates v so that its largest-modulus component is real and positive, and
// scales it to unit norm.
ComplexVector phase_normalized(ComplexVector v) {
  const double n = v.norm();
  if (n == 0.0) return v;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.dim(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  const Complex phase = std::conj(v[best]) / std::abs(v[best]);
  v *= phase / n;
  v[best] = std::abs(v[best]);
  return v;
}

bool less_value(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<RawPair> solve_2x2(const ComplexMatrix& m) {
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const Complex mean = 0.5 * (a + d);
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  std::vector<RawPair> out;
  const Complex values[2] = {mean - disc, mean + disc};
  for (int k = 0; k < 2; ++k) {
    const Complex lambda = values[k];
    ComplexVector v1{b, lambda - a};
    ComplexVector v2{lambda - d, c};
    ComplexVector v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() == 0.0) v = k == 0 ? ComplexVector{1.0, 0.0} : ComplexVector{0.0, 1.0};
    out.push_back({lambda, phase_normalized(std::move(v))});
  }
  return out;
}

void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
  const std::size_t n = h.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    std::vector<Complex> v(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = h(i, k);
    v[0] -= alpha;
    double vnorm = 0.0;
    for (const auto& z : v) vnorm += std::norm(z);
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) continue;
    for (auto& z : v) z /= vnorm;

    // h <- (I - 2 v v^dagger) h on rows k+1..n-1
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i - k - 1]) * h(i, j);
      s *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i - k - 1] * s;
    }
    // h <- h (I - 2 v v^dagger), q <- q (I - 2 v v^dagger) on cols k+1..n-1
    auto right_apply = [&](ComplexMatrix& a) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex s{};
        for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j - k - 1];
        s *= 2.0;
        for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j - k - 1]);
      }
    };
    right_apply(h);
    right_apply(q);
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c = 1.0;
  Complex s{};
};

Givens make_givens(Complex x, Complex y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double nrm = std::hypot(ax, ay);
  if (nrm == 0.0) return {};
  if (ax == 0.0) return {0.0, std::conj(y) / ay};
  return {ax / nrm, (x / ax) * std::conj(y) / nrm};
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
  const Complex mean = 0.5 * (a + d);
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex l1 = mean + disc;
  const Complex l2 = mean - disc;
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

// Complex Schur form t = z^dagger m z by Hessenberg reduction and shifted QR.
void schur(ComplexMatrix& t, ComplexMatrix& z, double scale, const Tolerances& tol) {
  const std::size_t n = t.rows();
  hessenberg(t, z);
  const auto max_iters =
      static_cast<long>(std::max(1.0, tol.max_qr_iters_per_dim) * static_cast<double>(n));
  long total = 0;
  int since_deflation = 0;
  std::vector<Givens> rotations(n);
  std::size_t hi = n - 1;
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      double thresh = kEps * (std::abs(t(lo - 1, lo - 1)) + std::abs(t(lo, lo)));
      if (thresh == 0.0) thresh = kEps * scale;
      if (std::abs(t(lo, lo - 1)) <= thresh) {
        t(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++total > max_iters) {
      throw Error(ErrorCode::no_convergence,
                  "QR iteration did not converge after " + std::to_string(max_iters) + " sweeps");
    }
    ++since_deflation;
    Complex mu;
    if (since_deflation % 10 == 0) {
      const double sub = std::abs(t(hi, hi - 1));
      mu = t(hi, hi) + Complex(0.75 * sub, 0.4375 * sub);
    } else {
      mu = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
    }

    for (std::size_t k = lo; k <= hi; ++k) t(k, k) -= mu;
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens g = make_givens(t(k, k), t(k + 1, k));
      rotations[k] = g;
      for (std::size_t j = k; j < n; ++j) {
        const Complex p = t(k, j);
        const Complex q = t(k + 1, j);
        t(k, j) = g.c * p + g.s * q;
        t(k + 1, j) = -std::conj(g.s) * p + g.c * q;
      }
      t(k + 1, k) = 0.0;
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens& g = rotations[k];
      const std::size_t last = std::min(k + 1, hi);
      for (std::size_t i = 0; i <= last; ++i) {
        const Complex a = t(i, k);
        const Complex b = t(i, k + 1);
        t(i, k) = g.c * a + std::conj(g.s) * b;
        t(i, k + 1) = -g.s * a + g.c * b;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Complex a = z(i, k);
        const Complex b = z(i, k + 1);
        z(i, k) = g.c * a + std::conj(g.s) * b;
        z(i, k + 1) = -g.s * a + g.c * b;
      }
    }
    for (std::size_t k = lo; k <= hi; ++k) t(k, k) += mu;
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) t(i, j) = 0.0;
  }
}

std::vector<RawPair> solve_general(const ComplexMatrix& m, double scale, const Tolerances& tol) {
  const std::size_t n = m.rows();
  ComplexMatrix t = m;
  ComplexMatrix z = ComplexMatrix::identity(n);
  schur(t, z, scale, tol);
  const double small = std::max(kEps * scale, std::numeric_limits<double>::min());
  std::vector<RawPair> out;
  out.reserve(n);
  std::vector<Complex> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lambda = t(k, k);
    std::fill(x.begin(), x.end(), Complex{});
    x[k] = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      Complex sum{};
      for (std::size_t j = i + 1; j <= k; ++j) sum += t(i, j) * x[j];
      Complex denom = t(i, i) - lambda;
      if (std::abs(denom) < small) denom = small;
      x[i] = -sum / denom;
    }
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex sum{};
      for (std::size_t j = 0; j <= k; ++j) sum += z(i, j) * x[j];
      v[i] = sum;
    }
    out.push_back({lambda, phase_normalized(std::move(v))});
  }
  return out;
}

std::vector<RawPair> right_eigensystem(const ComplexMatrix& m, double scale, const Tolerances& tol) {
  if (m.rows() == 1) return {{m(0, 0), ComplexVector{1.0}}};
  if (m.rows() == 2) return solve_2x2(m);
  return solve_general(m, scale, tol);
}

// Smallest singular value of a small square matrix.
double min_singular_value(const ComplexMatrix& g) {
  if (g.rows() == 1) return std::abs(g(0, 0));
  const ComplexMatrix gram = hermitian_part(adjoint(g) * g);
  Tolerances loose;
  loose.herm = 1.0;
  const auto spectrum = hermitian_spectrum(gram, loose);
  return std::sqrt(std::max(0.0, spectrum.front()));
}

ComplexMatrix cluster_gram(std::span<const EigenPair> pairs, const std::vector<std::size_t>& idx,
                           bool unit) {
  ComplexMatrix g(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const auto& l = pairs[idx[a]].left;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const auto& r = pairs[idx[b]].right;
      Complex overlap = dot(l, r);
      if (unit) overlap /= l.norm() * r.norm();
      g(a, b) = overlap;
    }
  }
  return g;
}

double defect_of(std::span<const EigenPair> pairs, double scale, const Tolerances& tol) {
  std::vector<Complex> values;
  values.reserve(pairs.size());
  for (const auto& p : pairs) values.push_back(p.value);
  double worst = 1.0;
  for (const auto& cluster : eigenvalue_clusters(values, tol.cluster * scale)) {
    for (std::size_t i : cluster) {
      if (pairs[i].left.norm() == 0.0 || pairs[i].right.norm() == 0.0) return 0.0;
    }
    worst = std::min(worst, min_singular_value(cluster_gram(pairs, cluster, true)));
  }
  return worst;
}

}  // namespace

std::vector<std::vector<std::size_t>> eigenvalue_clusters(std::span<const Complex> values,
                                                          double radius) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) {
        const std::size_t a = find(i), b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  return clusters;
}

EigenAnalysis eigen_analysis(const ComplexMatrix& m, const Tolerances& tol) {
  if (!m.is_square() || m.empty()) {
    throw Error(ErrorCode::dimension_mismatch, "eigendecompose: matrix must be square and non-empty");
  }
  const std::size_t n = m.rows();
  const double scale = norm(m);
  EigenAnalysis result;
  if (scale == 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      ComplexVector e(n);
      e[i] = 1.0;
      result.pairs.push_back({0.0, e, e});
    }
    result.defect_indicator = 1.0;
    return result;
  }

  auto right = right_eigensystem(m, scale, tol);
  std::sort(right.begin(), right.end(),
            [](const RawPair& a, const RawPair& b) { return less_value(a.value, b.value); });
  const auto left = right_eigensystem(adjoint(m), scale, tol);

  std::vector<bool> used(n, false);
  double worst_match = 0.0;
  result.pairs.reserve(n);
  for (const auto& r : right) {
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dist = std::abs(std::conj(left[j].value) - r.value);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    used[best] = true;
    worst_match = std::max(worst_match, best_dist);
    result.pairs.push_back({r.value, r.vector, left[best].vector});
  }

  if (worst_match > tol.match * scale) {
    // Matching failed; take the left vectors from the rows of V^-1 instead.
    std::vector<ComplexVector> columns;
    for (const auto& p : result.pairs) columns.push_back(p.right);
    try {
      const ComplexMatrix v_inv = inverse(ComplexMatrix::from_columns(columns), tol);
      for (std::size_t i = 0; i < n; ++i) {
        ComplexVector row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = std::conj(v_inv(i, j));
        result.pairs[i].left = phase_normalized(std::move(row));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular_matrix) throw;
    }
  }

  result.defect_indicator = defect_of(result.pairs, scale, tol);
  return result;
}

std::vector<EigenPair> eigendecompose(const ComplexMatrix& m, const Tolerances& tol) {
  EigenAnalysis analysis = eigen_analysis(m, tol);
  if (analysis.defect_indicator < tol.defect) {
    throw Error(ErrorCode::defective_matrix,
                "matrix is not diagonalizable to working precision (defect indicator " +
                    std::to_string(analysis.defect_indicator) + ")");
  }
  return std::move(analysis.pairs);
}

std::vector<ComplexVector> biorthogonal_duals(std::span<const EigenPair> pairs, double matrix_scale,
                                              const Tolerances& tol) {
  std::vector<Complex> values;
  values.reserve(pairs.size());
  for (const auto& p : pairs) values.push_back(p.value);
  std::vector<ComplexVector> duals(pairs.size());
  for (const auto& cluster : eigenvalue_clusters(values, tol.cluster * matrix_scale)) {
    for (std::size_t i : cluster) {
      if (pairs[i].left.norm() == 0.0 || pairs[i].right.norm() == 0.0) {
        throw Error(ErrorCode::defective_system, "zero eigenvector in biorthogonal system");
      }
    }
    const double indicator = min_singular_value(cluster_gram(pairs, cluster, true));
    if (!(indicator >= tol.defect)) {
      throw Error(ErrorCode::defective_system,
                  "eigenvectors do not form a biorthogonal system (overlap " +
                      std::to_string(indicator) + "); exceptional point");
    }
    const ComplexMatrix g = cluster_gram(pairs, cluster, false);
    Tolerances exact = tol;
    exact.singular = 0.0;
    const ComplexMatrix g_inv_adj = adjoint(inverse(g, exact));
    for (std::size_t a = 0; a < cluster.size(); ++a) {
      ComplexVector d(pairs[cluster[a]].left.dim());
      for (std::size_t b = 0; b < cluster.size(); ++b) {
        d += g_inv_adj(b, a) * pairs[cluster[b]].left;
      }
      duals[cluster[a]] = std::move(d);
    }
  }
  return duals;
}

}  // namespace metricforge
