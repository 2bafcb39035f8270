#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "metricforge/errors.hpp"
#include "metricforge/models.hpp"

using namespace metricforge;
using namespace metricforge::testing;

namespace {

const Complex kI{0.0, 1.0};

double spectrum_gap(const std::vector<Complex>& analytic, const ComplexMatrix& h) {
  const auto pairs = eigen_analysis(h).pairs;
  double worst = 0.0;
  std::vector<Complex> pool;
  for (const auto& p : pairs) pool.push_back(p.value);
  for (const auto& e : analytic) {
    auto it = std::min_element(pool.begin(), pool.end(), [&](Complex a, Complex b) { return std::abs(a - e) < std::abs(b - e); });
    worst = std::max(worst, std::abs(*it - e));
    pool.erase(it);
  }
  return worst;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(JcDoublet, ReferencePoint) {
  const ModelInstance m = make_model("jc_doublet", {{"eps", 0.5}, {"n", 0}, {"omega", 1}, {"rho", 0.125}});
  EXPECT_EQ(m.phase, Phase::unbroken);
  ASSERT_EQ(m.analytic_eigenvalues.size(), 2U);
  const double split = 0.5 * std::sqrt(0.75) / 2.0;
  EXPECT_NEAR(m.analytic_eigenvalues[0].real(), 0.5 - split, 1e-15);
  EXPECT_NEAR(m.analytic_eigenvalues[1].real(), 0.5 + split, 1e-15);
  EXPECT_NEAR(m.analytic_eigenvalues[0].real(), 0.2835, 5e-5);
  EXPECT_NEAR(m.analytic_eigenvalues[1].real(), 0.7165, 5e-5);
  EXPECT_LE(max_abs_diff(*m.analytic_metric, ComplexMatrix{{1, -0.5}, {-0.5, 1}}), 1e-15);
  EXPECT_EQ(m.similarity, (ComplexMatrix{{1, 0}, {0, -1}}));
  EXPECT_LE(spectrum_gap(m.analytic_eigenvalues, m.hamiltonian), 1e-14);
}

TEST(JcDoublet, DecoupledIsDiagonal) {
  const ModelInstance m = make_model("jc_doublet", {{"eps", 0.7}, {"n", 2}, {"omega", 1.3}, {"rho", 0}});
  EXPECT_EQ(m.hamiltonian(0, 1), Complex(0.0));
  EXPECT_EQ(m.hamiltonian(1, 0), Complex(0.0));
  std::vector<double> expected{0.35 + 2 * 1.3, -0.35 + 3 * 1.3};
  std::sort(expected.begin(), expected.end());
  EXPECT_NEAR(m.analytic_eigenvalues[0].real(), expected[0], 1e-14);
  EXPECT_NEAR(m.analytic_eigenvalues[1].real(), expected[1], 1e-14);
  EXPECT_EQ(*m.analytic_metric, ComplexMatrix::identity(2));
}

TEST(JcDoublet, BrokenEigenvalues) {
  const ModelInstance m = make_model("jc_doublet", {{"eps", 0.5}, {"n", 0}, {"omega", 1}, {"rho", 0.3}});
  EXPECT_EQ(m.phase, Phase::broken);
  EXPECT_FALSE(m.analytic_metric.has_value());
  EXPECT_FALSE(m.das_data.has_value());
  const double im = 0.5 * std::sqrt(4 * 0.09 - 0.25);
  EXPECT_NEAR(im, 0.16583, 1e-5);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[0] - Complex(0.5, -im)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[1] - Complex(0.5, im)), 0.0, 1e-15);
  for (const auto& v : m.broken_eigenvectors) {
    EXPECT_LE((m.hamiltonian * v.vector - v.value * v.vector).norm(), 1e-14 * v.vector.norm());
  }
  EXPECT_EQ(code_of([&] { model_das_metric(m); }), ErrorCode::broken_phase);
}

TEST(JcDoublet, ExceptionalPointCoalesces) {
  for (double n : {0.0, 1.0, 3.0}) {
    const double rho_c = 0.5 / (2.0 * std::sqrt(n + 1.0));
    const ModelInstance m = make_model("jc_doublet", {{"eps", 0.5}, {"n", n}, {"omega", 1}, {"rho", rho_c}});
    EXPECT_EQ(m.phase, Phase::exceptional) << "n = " << n;
    EXPECT_NEAR(std::abs(m.analytic_eigenvalues[0] - m.analytic_eigenvalues[1]), 0.0, 1e-12);
    EXPECT_NEAR(m.analytic_eigenvalues[0].real(), (2 * n + 1) / 2.0, 1e-12);
    EXPECT_EQ(code_of([&] { biorthonormalize(eigen_analysis(m.hamiltonian).pairs, Normalization::unit_left, {}, norm(m.hamiltonian)); }),
              ErrorCode::defective_system);
    EXPECT_EQ(code_of([&] { model_das_metric(m); }), ErrorCode::defective_system);
  }
}

TEST(JcFull, DecoupledSingleLevel) {
  const ModelInstance m = make_model("jc_full", {{"eps", 0.5}, {"levels", 1}, {"omega", 1}, {"rho", 0}});
  ASSERT_EQ(m.hamiltonian.rows(), 3U);
  const std::vector<Complex> diag{-0.25, 0.25, 0.75};
  EXPECT_EQ(m.hamiltonian, ComplexMatrix::diagonal(diag));
}

TEST(JcFull, TwoLevelBlocks) {
  const ModelInstance m = make_model("jc_full", {{"eps", 0.5}, {"levels", 2}, {"omega", 1}, {"rho", 0.1}});
  ASSERT_EQ(m.hamiltonian.rows(), 5U);
  const ComplexMatrix& q = *m.analytic_metric;
  EXPECT_EQ(q(0, 0), Complex(1.0));
  EXPECT_NEAR(q(1, 2).real(), -0.4, 1e-15);
  EXPECT_NEAR(q(3, 4).real(), -0.4 * std::sqrt(2.0), 1e-15);
  EXPECT_GT(hermitian_spectrum(q).front(), 0.0);
  EXPECT_EQ(compare_metrics(model_spectral_metric(m).matrix, q).verdict, Verdict::equal);
  EXPECT_EQ(compare_metrics(model_das_metric(m).matrix, q).verdict, Verdict::equal);
}

TEST(JcFull, GroundStateEnergyIndependentOfCoupling) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    ParamMap p = jc_full_params(rng, uniform(rng, 0.0, 2.0));
    const ModelInstance m = make_model(ModelFamily::jc_full, p);
    EXPECT_EQ(m.hamiltonian(0, 0), Complex(-p["eps"] / 2.0));
    for (std::size_t j = 1; j < m.hamiltonian.rows(); ++j) {
      EXPECT_EQ(m.hamiltonian(0, j), Complex(0.0));
      EXPECT_EQ(m.hamiltonian(j, 0), Complex(0.0));
    }
  }
}

TEST(JcFull, MetricDeterminantIsProductOfBlocks) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    ParamMap p = jc_full_params(rng, uniform(rng, 0.0, 0.95));
    const ModelInstance m = make_model(ModelFamily::jc_full, p);
    const double delta = p["hbar"] * p["omega"] - p["eps"];
    double expected = 1.0;
    for (double n = 0; n < p["levels"]; ++n) {
      const double sin_t = 2.0 * p["rho"] * std::sqrt(n + 1.0) / delta;
      expected *= 1.0 - sin_t * sin_t;
    }
    EXPECT_NEAR(determinant(*m.analytic_metric).real(), expected, 1e-10);
  }
}

TEST(PtMatrix, ReferencePoint) {
  const ModelInstance m =
      make_model("pt_matrix", {{"phi", 0}, {"r", 1}, {"s", 1}, {"t", 1}, {"theta", std::numbers::pi / 6}});
  EXPECT_EQ(m.phase, Phase::unbroken);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[1] - std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_LE(max_abs_diff(*m.analytic_metric, ComplexMatrix{{1, -0.5 * kI}, {0.5 * kI, 1}}), 1e-15);
  const Complex e = std::exp(kI * 0.0);
  EXPECT_EQ(m.similarity, (ComplexMatrix{{0, e}, {std::conj(e), 0}}));
}

TEST(PtMatrix, HermitianLimit) {
  const ModelInstance m = make_model("pt_matrix", {{"r", 0}, {"s", 0.7}, {"t", 0.7}, {"theta", 0.4}});
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[0] + 0.7), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[1] - 0.7), 0.0, 1e-15);
  EXPECT_LE(max_abs_diff(*m.analytic_metric, ComplexMatrix::identity(2)), 1e-15);
}

TEST(PtMatrix, BrokenEigenvalues) {
  const ModelInstance m =
      make_model("pt_matrix", {{"r", 1}, {"s", 0.5}, {"t", 0.5}, {"theta", std::numbers::pi / 2}});
  EXPECT_EQ(m.phase, Phase::broken);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[0] - Complex(0, -std::sqrt(0.75))), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.analytic_eigenvalues[1] - Complex(0, std::sqrt(0.75))), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(0.75), 0.8660, 5e-5);
  ASSERT_EQ(m.broken_eigenvectors.size(), 2U);
  for (const auto& v : m.broken_eigenvectors) {
    EXPECT_LE((m.hamiltonian * v.vector - v.value * v.vector).norm(), 1e-12 * v.vector.norm());
  }
}

TEST(PtMatrix, OppositeSignsHaveNoMetric) {
  const ModelInstance m = make_model("pt_matrix", {{"r", 1}, {"s", 1}, {"t", -1}, {"theta", 0.3}});
  EXPECT_NE(m.phase, Phase::unbroken);
  EXPECT_FALSE(m.analytic_metric.has_value());
  EXPECT_EQ(code_of([&] { model_analytic_metric(m); }), ErrorCode::broken_phase);
}

TEST(DiracScalar, ReferencePoint) {
  const ModelInstance m = make_model("dirac_scalar", {{"m0", 1}, {"kx", 0}, {"v0", 0.6}});
  EXPECT_NEAR(m.analytic_eigenvalues[1].real(), 0.8, 1e-15);
  EXPECT_NEAR(m.analytic_eigenvalues[0].real(), -0.8, 1e-15);
  EXPECT_LE(max_abs_diff(*m.analytic_metric, ComplexMatrix{{1.25, 0.75}, {0.75, 1.25}}), 1e-14);
  const auto eig = hermitian_spectrum(*m.analytic_metric);
  EXPECT_NEAR(eig[0], 0.5, 1e-14);
  EXPECT_NEAR(eig[1], 2.0, 1e-14);
}

TEST(DiracScalar, HermitianLimit) {
  const ModelInstance m = make_model("dirac_scalar", {{"m0", 0.8}, {"kx", 0.4}, {"v0", 0}});
  EXPECT_LE(max_abs_diff(*m.analytic_metric, ComplexMatrix::identity(2)), 1e-14);
}

TEST(DiracScalar, ExceptionalAtZeroEnergy) {
  const ModelInstance m = make_model("dirac_scalar", {{"m0", 1}, {"kx", 0}, {"v0", 1}});
  EXPECT_EQ(m.phase, Phase::exceptional);
  EXPECT_FALSE(m.analytic_metric.has_value());
  EXPECT_LT(eigen_analysis(m.hamiltonian).defect_indicator, 1e-8);
}

TEST(DiracScalar, GeneratorSingularWhenPotentialMatchesMomentum) {
  const ModelInstance m = make_model("dirac_scalar", {{"m0", 1}, {"kx", 0.5}, {"v0", 0.5}});
  EXPECT_EQ(m.phase, Phase::unbroken);
  EXPECT_FALSE(m.das_data.has_value());
  EXPECT_EQ(code_of([&] { model_das_metric(m); }), ErrorCode::invalid_construction);
  EXPECT_TRUE(model_spectral_metric(m).report.positive);
}

TEST(Params, ValidationAndDefaults) {
  const ParamMap full = complete_params(ModelFamily::dirac_scalar, {{"m0", 1}, {"v0", 0.2}});
  EXPECT_EQ(full.at("c"), 1.0);
  EXPECT_EQ(full.at("hbar"), 1.0);
  EXPECT_EQ(full.at("kx"), 0.0);

  EXPECT_EQ(code_of([] { complete_params(ModelFamily::jc_doublet, {{"eps", 1}, {"n", 0}, {"omega", 1}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { complete_params(ModelFamily::jc_doublet, {{"eps", 1}, {"n", 0.5}, {"omega", 1}, {"rho", 0}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { complete_params(ModelFamily::jc_doublet, {{"eps", 1}, {"n", 0}, {"omega", 0}, {"rho", 0}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { complete_params(ModelFamily::pt_matrix, {{"r", 1}, {"s", 1}, {"t", 1}, {"theta", 0}, {"x", 1}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { complete_params(ModelFamily::dirac_scalar, {{"m0", -1}, {"v0", 0}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { complete_params(ModelFamily::jc_full, {{"eps", 1}, {"levels", 0}, {"omega", 1}, {"rho", 0}}); }),
            ErrorCode::invalid_params);
  EXPECT_EQ(code_of([] { parse_family("jc"); }), ErrorCode::invalid_params);
  for (auto f : kFamilies) EXPECT_EQ(parse_family(to_string(f)), f);
}

TEST(ModelProperties, PseudoHermitianAgainstDeclaredS) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const ModelFamily f = kFamilies[trial % 4];
    const ModelInstance m = make_model(f, random_params(rng, f, uniform(rng, 0.0, 3.0)));
    EXPECT_LE(check_pseudo_hermitian(m.hamiltonian, m.similarity), 1e-12) << to_string(f) << " trial " << trial;
  }
}

TEST(ModelProperties, UnbrokenSpectraAndMetricsAgree) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 1000; ++trial) {
    const ModelFamily f = kFamilies[trial % 4];
    const ModelInstance m = random_unbroken(rng, f);
    ASSERT_EQ(m.phase, Phase::unbroken);
    const double scale = std::max(1.0, norm(m.hamiltonian));
    EXPECT_LE(spectrum_gap(m.analytic_eigenvalues, m.hamiltonian), 1e-10 * scale) << to_string(f) << " trial " << trial;

    const Verdict v = compare_metrics(model_spectral_metric(m).matrix, *m.analytic_metric).verdict;
    EXPECT_EQ(v, Verdict::equal) << to_string(f) << " trial " << trial;
    if (m.das_data) {
      const Verdict d = compare_metrics(model_das_metric(m).matrix, *m.analytic_metric).verdict;
      if (f == ModelFamily::pt_matrix) {
        EXPECT_NE(d, Verdict::distinct) << "trial " << trial;
      } else {
        EXPECT_EQ(d, Verdict::equal) << to_string(f) << " trial " << trial;
      }
    }
  }
}

TEST(ModelProperties, BrokenSpectraComeInConjugatePairs) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const ModelFamily f = kFamilies[trial % 4];
    const ModelInstance m = random_broken(rng, f);
    ASSERT_EQ(m.phase, Phase::broken) << to_string(f) << " trial " << trial;
    std::vector<Complex> values;
    for (const auto& p : eigen_analysis(m.hamiltonian).pairs) values.push_back(p.value);
    std::vector<Complex> conj;
    for (const auto& v : values) conj.push_back(std::conj(v));
    EXPECT_LE(spectrum_gap(conj, m.hamiltonian), 1e-10 * std::max(1.0, norm(m.hamiltonian)))
        << to_string(f) << " trial " << trial;
  }
}
