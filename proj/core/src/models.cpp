#include "metricforge/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "metricforge/errors.hpp"

namespace metricforge {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Complex kI{0.0, 1.0};

// Discriminants closer to zero than a few ulp of their terms are exceptional.
Phase phase_of(double disc, double magnitude) {
  if (std::abs(disc) <= 16.0 * kEps * magnitude) return Phase::exceptional;
  return disc > 0.0 ? Phase::unbroken : Phase::broken;
}

int worse(Phase p) {
  switch (p) {
    case Phase::unbroken: return 0;
    case Phase::broken: return 1;
    case Phase::exceptional: return 2;
  }
  return 0;
}

bool less_value(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void sort_pairs(std::vector<EigenPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const EigenPair& a, const EigenPair& b) { return less_value(a.value, b.value); });
}

void sort_values(std::vector<Complex>& values) { std::sort(values.begin(), values.end(), less_value); }

double get(const ParamMap& p, const char* name) { return p.find(name)->second; }

bool is_nonneg_integer(double x) { return x >= 0.0 && std::floor(x) == x; }

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::invalid_params, message); }

DasConstruction das_from_pairs(const ComplexMatrix& s, const std::vector<EigenPair>& pairs,
                               const ComplexVector& reference,
                               const std::vector<ComplexMatrix>& sigmas) {
  DasConstruction das;
  das.q0 = reference_metric(s, reference);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    das.generators.push_back({pairs[i].value, sigmas[i]});
    das.projectors.push_back(spectral_projector(pairs[i]));
    das.phases.push_back(sign_fixing_phase(s, pairs[i].right));
  }
  return das;
}

// ------------------------------------------------------------ spin-oscillator

struct JcBlock {
  ComplexMatrix h;
  double disc = 0.0;
  Phase phase = Phase::unbroken;
  std::vector<Complex> eigenvalues;
  std::vector<EigenPair> pairs;  // unit left, ascending; unbroken only
  std::vector<ModelEigenvector> broken;
  ComplexVector reference;  // (cos(theta/2), sin(theta/2)) / cos(theta)
  Complex reference_value;
  ComplexMatrix metric;
};

JcBlock jc_block(double n, double eps, double omega, double rho, double hbar) {
  JcBlock blk;
  const double a = eps / 2.0 + n * hbar * omega;
  const double d = -eps / 2.0 + (n + 1.0) * hbar * omega;
  const double b = rho * std::sqrt(n + 1.0);
  const double delta = hbar * omega - eps;
  const double mid = (2.0 * n + 1.0) * hbar * omega / 2.0;
  blk.h = ComplexMatrix{{a, b}, {-b, d}};
  blk.disc = delta * delta - 4.0 * b * b;
  blk.phase = b == 0.0 ? Phase::unbroken : phase_of(blk.disc, delta * delta + 4.0 * b * b);

  if (blk.phase == Phase::unbroken) {
    const double sin_t = b == 0.0 ? 0.0 : 2.0 * b / delta;
    const double theta = std::asin(sin_t);
    const double cos_t = std::cos(theta);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const double half_split = delta * cos_t / 2.0;
    blk.reference = ComplexVector{c / cos_t, s / cos_t};
    blk.reference_value = mid - half_split;
    blk.pairs.push_back({mid - half_split, blk.reference, ComplexVector{c, -s}});
    blk.pairs.push_back({mid + half_split, ComplexVector{s / cos_t, c / cos_t}, ComplexVector{-s, c}});
    sort_pairs(blk.pairs);
    for (const auto& p : blk.pairs) blk.eigenvalues.push_back(p.value);
    blk.metric = ComplexMatrix{{1.0, -sin_t}, {-sin_t, 1.0}};
  } else if (blk.phase == Phase::broken) {
    const double sin_tp = delta / (2.0 * b);
    const double cos_tp = std::sqrt(std::max(0.0, 1.0 - sin_tp * sin_tp));
    for (double sign : {-1.0, 1.0}) {
      const Complex y{sin_tp, sign * cos_tp};
      blk.broken.push_back({a + b * y, ComplexVector{1.0, y}});
      blk.eigenvalues.push_back(a + b * y);
    }
  } else {
    blk.eigenvalues = {mid, mid};
  }
  sort_values(blk.eigenvalues);
  return blk;
}

ModelInstance build_jc_doublet(const ParamMap& p) {
  ModelInstance m;
  m.family = ModelFamily::jc_doublet;
  m.params = p;
  const JcBlock blk = jc_block(get(p, "n"), get(p, "eps"), get(p, "omega"), get(p, "rho"), get(p, "hbar"));
  m.hamiltonian = blk.h;
  m.similarity = ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}};
  m.analytic_eigenvalues = blk.eigenvalues;
  m.broken_eigenvectors = blk.broken;
  m.phase = blk.phase;
  m.discriminant = blk.disc;
  if (blk.phase == Phase::unbroken) {
    m.analytic_pairs = blk.pairs;
    m.analytic_metric = blk.metric;
    const ComplexMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
    std::vector<ComplexMatrix> sigmas;
    for (const auto& pair : blk.pairs) {
      sigmas.push_back(pair.right == blk.reference ? ComplexMatrix::identity(2) : swap);
    }
    m.das_data = das_from_pairs(m.similarity, blk.pairs, blk.reference, sigmas);
  }
  return m;
}

ComplexVector embed(const ComplexVector& v, std::size_t dim, std::size_t offset) {
  ComplexVector out(dim);
  for (std::size_t i = 0; i < v.dim(); ++i) out[offset + i] = v[i];
  return out;
}

ModelInstance build_jc_full(const ParamMap& p) {
  ModelInstance m;
  m.family = ModelFamily::jc_full;
  m.params = p;
  const auto levels = static_cast<std::size_t>(get(p, "levels"));
  const double eps = get(p, "eps");
  const double omega = get(p, "omega");
  const double rho = get(p, "rho");
  const double hbar = get(p, "hbar");
  const std::size_t dim = 2 * levels + 1;

  m.hamiltonian = ComplexMatrix(dim, dim);
  m.similarity = ComplexMatrix(dim, dim);
  ComplexMatrix metric(dim, dim);
  m.hamiltonian(0, 0) = -eps / 2.0;
  m.similarity(0, 0) = -1.0;
  metric(0, 0) = 1.0;

  ComplexVector ground(dim);
  ground[0] = 1.0;
  std::vector<EigenPair> pairs{{-eps / 2.0, ground, ground}};
  m.analytic_eigenvalues.push_back(-eps / 2.0);
  m.discriminant = std::numeric_limits<double>::infinity();
  ComplexVector reference;
  Complex reference_value;

  for (std::size_t k = 0; k < levels; ++k) {
    const JcBlock blk = jc_block(static_cast<double>(k), eps, omega, rho, hbar);
    const std::size_t o = 1 + 2 * k;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        m.hamiltonian(o + i, o + j) = blk.h(i, j);
        if (blk.phase == Phase::unbroken) metric(o + i, o + j) = blk.metric(i, j);
      }
    }
    m.similarity(o, o) = 1.0;
    m.similarity(o + 1, o + 1) = -1.0;
    m.analytic_eigenvalues.insert(m.analytic_eigenvalues.end(), blk.eigenvalues.begin(), blk.eigenvalues.end());
    m.discriminant = std::min(m.discriminant, blk.disc);
    if (worse(blk.phase) > worse(m.phase)) m.phase = blk.phase;
    for (const auto& v : blk.broken) m.broken_eigenvectors.push_back({v.value, embed(v.vector, dim, o)});
    if (blk.phase == Phase::unbroken) {
      for (const auto& pair : blk.pairs) {
        pairs.push_back({pair.value, embed(pair.right, dim, o), embed(pair.left, dim, o)});
      }
      if (k == 0) {
        reference = embed(blk.reference, dim, o);
        reference_value = blk.reference_value;
      }
    }
  }
  sort_values(m.analytic_eigenvalues);

  if (m.phase == Phase::unbroken) {
    sort_pairs(pairs);
    m.analytic_pairs = pairs;
    m.analytic_metric = metric;
    // Every level is reached from the doublet-0 reference state by the
    // biorthogonal transposition exchanging the two states.
    const EigenPair* ref = nullptr;
    for (const auto& pair : pairs) {
      if (pair.value == reference_value && pair.right == reference) ref = &pair;
    }
    std::vector<ComplexMatrix> sigmas;
    for (const auto& pair : pairs) {
      if (&pair == ref) {
        sigmas.push_back(ComplexMatrix::identity(dim));
        continue;
      }
      ComplexMatrix t = ComplexMatrix::identity(dim);
      t -= outer(ref->right, ref->left);
      t -= outer(pair.right, pair.left);
      t += outer(pair.right, ref->left);
      t += outer(ref->right, pair.left);
      sigmas.push_back(std::move(t));
    }
    m.das_data = das_from_pairs(m.similarity, pairs, reference, sigmas);
  }
  return m;
}

// ------------------------------------------------------------ PT matrix

// Unit eigenvectors of the unbroken PT matrix for s, t > 0.
ComplexVector pt_plus(double s, double t, double rp, double phi, double q) {
  const Complex pre = 1.0 / std::sqrt(s + t);
  const Complex e = std::exp(kI * (phi / 2.0));
  return ComplexVector{pre * std::pow(s / t, 0.25) * std::sqrt(Complex(q, rp)) * e,
                       pre * std::pow(t / s, 0.25) * std::sqrt(Complex(q, -rp)) / e};
}

ComplexVector pt_minus(double s, double t, double rp, double phi, double q) {
  const Complex pre = kI / std::sqrt(s + t);
  const Complex e = std::exp(kI * (phi / 2.0));
  return ComplexVector{pre * std::pow(s / t, 0.25) * std::sqrt(Complex(q, -rp)) * e,
                       -pre * std::pow(t / s, 0.25) * std::sqrt(Complex(q, rp)) / e};
}

double residual(const ComplexMatrix& h, Complex value, const ComplexVector& v) {
  return (h * v - value * v).norm() / std::max(v.norm(), std::numeric_limits<double>::min());
}

ComplexVector null_vector_2x2(const ComplexMatrix& h, Complex value) {
  ComplexVector v1{h(0, 1), value - h(0, 0)};
  ComplexVector v2{value - h(1, 1), h(1, 0)};
  return (v1.norm() >= v2.norm() ? v1 : v2).normalized();
}

ModelInstance build_pt(const ParamMap& p) {
  ModelInstance m;
  m.family = ModelFamily::pt_matrix;
  m.params = p;
  const double r = get(p, "r");
  const double s = get(p, "s");
  const double t = get(p, "t");
  const double theta = get(p, "theta");
  const double phi = get(p, "phi");
  const Complex e_phi = std::exp(kI * phi);
  m.hamiltonian = ComplexMatrix{{r * std::exp(kI * theta), s * e_phi}, {t * std::conj(e_phi), r * std::exp(-kI * theta)}};
  m.similarity = ComplexMatrix{{0.0, e_phi}, {std::conj(e_phi), 0.0}};

  const double rp = r * std::sin(theta);
  const double rc = r * std::cos(theta);
  m.discriminant = s * t - rp * rp;
  const bool degenerate = s == 0.0 && t == 0.0 && rp == 0.0;
  m.phase = degenerate ? Phase::unbroken : phase_of(m.discriminant, std::abs(s * t) + rp * rp);

  if (degenerate) {
    m.analytic_eigenvalues = {rc, rc};
    m.analytic_pairs = {{rc, ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}},
                        {rc, ComplexVector{0.0, 1.0}, ComplexVector{0.0, 1.0}}};
    m.analytic_metric = ComplexMatrix::identity(2);
    return m;
  }

  if (m.phase == Phase::unbroken) {
    const double q = std::sqrt(m.discriminant);
    // With s, t < 0 the matrix equals the s, t > 0 one at phi + pi.
    const double sp = std::abs(s), tp = std::abs(t);
    const double phip = s < 0.0 ? phi + std::numbers::pi : phi;
    const ComplexVector plus = pt_plus(sp, tp, rp, phip, q);
    const ComplexVector minus = pt_minus(sp, tp, rp, phip, q);
    // H^dagger has the same form with s and t exchanged and theta negated.
    const std::vector<EigenPair> raw{{rc - q, minus, pt_minus(tp, sp, -rp, phip, q)},
                                     {rc + q, plus, pt_plus(tp, sp, -rp, phip, q)}};
    m.analytic_pairs = biorthonormalize(raw, Normalization::unit_left).pairs;
    m.analytic_eigenvalues = {rc - q, rc + q};
    const double k = 2.0 / (s + t);
    m.analytic_metric = ComplexMatrix{{k * t, -k * kI * rp * e_phi}, {k * kI * rp * std::conj(e_phi), k * s}};

    const Complex e_phip = std::exp(kI * phip);
    const ComplexMatrix sigma_plus{{0.0, kI * std::sqrt(sp / tp) * e_phip},
                                   {-kI * std::sqrt(tp / sp) * std::conj(e_phip), 0.0}};
    m.das_data = das_from_pairs(m.similarity, m.analytic_pairs, minus, {ComplexMatrix::identity(2), sigma_plus});
  } else if (m.phase == Phase::broken) {
    const double qt = std::sqrt(-m.discriminant);
    const Complex e_low{rc, -qt}, e_high{rc, qt};
    const Complex norm_sq = std::sqrt(Complex((s + t) * rp + (s - t) * qt));
    const Complex h = std::exp(kI * (phi / 2.0));
    const Complex sq_s_minus = std::sqrt(Complex(s * (rp - qt)));
    const Complex sq_s_plus = std::sqrt(Complex(s * (rp + qt)));
    const Complex sq_t_minus = std::sqrt(Complex(t * (rp - qt)));
    const Complex sq_t_plus = std::sqrt(Complex(t * (rp + qt)));
    std::vector<ModelEigenvector> vecs;
    if (norm_sq != Complex{}) {
      vecs.push_back({e_low, ComplexVector{(-kI / norm_sq) * kI * sq_s_minus * h, (-kI / norm_sq) * sq_t_plus / h}});
      vecs.push_back({e_high, ComplexVector{(kI / norm_sq) * sq_s_plus * h, (kI / norm_sq) * -kI * sq_t_minus / h}});
    }
    // Fall back to the null vector where the closed form's branch does not apply.
    const double tol = 1e-10 * std::max(1.0, norm(m.hamiltonian));
    for (const Complex e : {e_low, e_high}) {
      auto it = std::find_if(vecs.begin(), vecs.end(), [&](const ModelEigenvector& v) { return v.value == e; });
      if (it == vecs.end()) {
        vecs.push_back({e, null_vector_2x2(m.hamiltonian, e)});
      } else if (!(it->vector.norm() > 0.0) || residual(m.hamiltonian, e, it->vector) > tol) {
        it->vector = null_vector_2x2(m.hamiltonian, e);
      }
    }
    m.broken_eigenvectors = vecs;
    m.analytic_eigenvalues = {e_low, e_high};
  } else {
    m.analytic_eigenvalues = {rc, rc};
  }
  return m;
}

// ------------------------------------------------------------ Dirac

ModelInstance build_dirac(const ParamMap& p) {
  ModelInstance m;
  m.family = ModelFamily::dirac_scalar;
  m.params = p;
  const double c = get(p, "c");
  const double mc2 = get(p, "m0") * c * c;
  const double cp = c * get(p, "hbar") * get(p, "kx");
  const double v0 = get(p, "v0");
  m.hamiltonian = ComplexMatrix{{mc2, cp + v0}, {cp - v0, -mc2}};
  m.similarity = (mc2 == 0.0 && cp == 0.0) ? ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}
                                           : ComplexMatrix{{mc2, cp}, {cp, -mc2}};
  m.discriminant = cp * cp + mc2 * mc2 - v0 * v0;
  const double magnitude = cp * cp + mc2 * mc2 + v0 * v0;
  m.phase = magnitude == 0.0 ? Phase::unbroken : phase_of(m.discriminant, magnitude);

  if (magnitude == 0.0) {
    m.analytic_eigenvalues = {0.0, 0.0};
    m.analytic_pairs = {{0.0, ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}},
                        {0.0, ComplexVector{0.0, 1.0}, ComplexVector{0.0, 1.0}}};
    m.analytic_metric = ComplexMatrix::identity(2);
    return m;
  }

  if (m.phase == Phase::unbroken) {
    const double e = std::sqrt(m.discriminant);
    const double big = e + mc2;
    const double nn = std::sqrt(big / (2.0 * e));
    const ComplexVector psi1{nn, nn * (cp - v0) / big};
    const ComplexVector phi1{nn, nn * (cp + v0) / big};
    const ComplexVector psi2{-nn * (cp + v0) / big, nn};
    const ComplexVector phi2{-nn * (cp - v0) / big, nn};
    m.analytic_pairs = {{-e, psi2, phi2}, {e, psi1, phi1}};
    m.analytic_eigenvalues = {-e, e};
    m.analytic_metric = outer(phi1, phi1) + outer(phi2, phi2);
    // The E+ generator maps psi2 onto psi1 and is invertible only when v0 != +-cp.
    const double floor = 16.0 * kEps * std::sqrt(magnitude);
    if (std::abs(cp + v0) > floor && std::abs(cp - v0) > floor) {
      const ComplexMatrix sigma_plus{{0.0, 1.0}, {(v0 - cp) / (v0 + cp), 0.0}};
      m.das_data = das_from_pairs(m.similarity, m.analytic_pairs, psi2, {ComplexMatrix::identity(2), sigma_plus});
    }
  } else if (m.phase == Phase::broken) {
    const double g = std::sqrt(-m.discriminant);
    for (const Complex e : {Complex(0.0, -g), Complex(0.0, g)}) {
      m.broken_eigenvectors.push_back({e, null_vector_2x2(m.hamiltonian, e)});
      m.analytic_eigenvalues.push_back(e);
    }
  } else {
    m.analytic_eigenvalues = {0.0, 0.0};
  }
  return m;
}

}  // namespace

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::unbroken: return "unbroken";
    case Phase::broken: return "broken";
    case Phase::exceptional: return "exceptional";
  }
  return "unknown";
}

std::string_view to_string(ModelFamily f) noexcept {
  switch (f) {
    case ModelFamily::jc_doublet: return "jc_doublet";
    case ModelFamily::jc_full: return "jc_full";
    case ModelFamily::pt_matrix: return "pt_matrix";
    case ModelFamily::dirac_scalar: return "dirac_scalar";
  }
  return "unknown";
}

ModelFamily parse_family(std::string_view name) {
  for (auto f : {ModelFamily::jc_doublet, ModelFamily::jc_full, ModelFamily::pt_matrix, ModelFamily::dirac_scalar}) {
    if (name == to_string(f)) return f;
  }
  invalid("unknown model family '" + std::string(name) + "'");
}

const std::vector<ParamSpec>& family_params(ModelFamily f) {
  static const std::vector<ParamSpec> jc{{"eps", {}}, {"hbar", 1.0}, {"n", {}}, {"omega", {}}, {"rho", {}}};
  static const std::vector<ParamSpec> full{{"eps", {}}, {"hbar", 1.0}, {"levels", {}}, {"omega", {}}, {"rho", {}}};
  static const std::vector<ParamSpec> pt{{"phi", 0.0}, {"r", {}}, {"s", {}}, {"t", {}}, {"theta", {}}};
  static const std::vector<ParamSpec> dirac{{"c", 1.0}, {"hbar", 1.0}, {"kx", 0.0}, {"m0", {}}, {"v0", {}}};
  switch (f) {
    case ModelFamily::jc_doublet: return jc;
    case ModelFamily::jc_full: return full;
    case ModelFamily::pt_matrix: return pt;
    case ModelFamily::dirac_scalar: return dirac;
  }
  return jc;
}

ParamMap complete_params(ModelFamily f, const ParamMap& params) {
  const auto& specs = family_params(f);
  for (const auto& [name, value] : params) {
    const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == name; });
    if (!known) invalid("unknown parameter '" + name + "' for " + std::string(to_string(f)));
    if (!std::isfinite(value)) invalid("parameter '" + name + "' is not finite");
  }
  ParamMap out;
  for (const auto& spec : specs) {
    auto it = params.find(spec.name);
    if (it != params.end()) {
      out[spec.name] = it->second;
    } else if (spec.default_value) {
      out[spec.name] = *spec.default_value;
    } else {
      invalid("missing parameter '" + spec.name + "' for " + std::string(to_string(f)));
    }
  }
  switch (f) {
    case ModelFamily::jc_doublet:
      if (!is_nonneg_integer(out["n"])) invalid("n must be a nonnegative integer");
      [[fallthrough]];
    case ModelFamily::jc_full:
      if (f == ModelFamily::jc_full && (!is_nonneg_integer(out["levels"]) || out["levels"] < 1.0 || out["levels"] > 512.0)) {
        invalid("levels must be an integer in [1, 512]");
      }
      if (!(out["omega"] > 0.0)) invalid("omega must be positive");
      if (!(out["hbar"] > 0.0)) invalid("hbar must be positive");
      break;
    case ModelFamily::pt_matrix:
      break;
    case ModelFamily::dirac_scalar:
      if (!(out["m0"] >= 0.0)) invalid("m0 must be nonnegative");
      if (!(out["c"] > 0.0)) invalid("c must be positive");
      if (!(out["hbar"] > 0.0)) invalid("hbar must be positive");
      break;
  }
  return out;
}

ModelInstance make_model(ModelFamily family, const ParamMap& params) {
  const ParamMap p = complete_params(family, params);
  switch (family) {
    case ModelFamily::jc_doublet: return build_jc_doublet(p);
    case ModelFamily::jc_full: return build_jc_full(p);
    case ModelFamily::pt_matrix: return build_pt(p);
    case ModelFamily::dirac_scalar: return build_dirac(p);
  }
  invalid("unknown model family");
}

ModelInstance make_model(std::string_view family, const ParamMap& params) {
  return make_model(parse_family(family), params);
}

double model_discriminant(ModelFamily family, const ParamMap& params) {
  const ParamMap p = complete_params(family, params);
  switch (family) {
    case ModelFamily::jc_doublet: {
      const double delta = get(p, "hbar") * get(p, "omega") - get(p, "eps");
      const double rho = get(p, "rho");
      return delta * delta - 4.0 * rho * rho * (get(p, "n") + 1.0);
    }
    case ModelFamily::jc_full: {
      const double delta = get(p, "hbar") * get(p, "omega") - get(p, "eps");
      const double rho = get(p, "rho");
      return delta * delta - 4.0 * rho * rho * get(p, "levels");
    }
    case ModelFamily::pt_matrix: {
      const double rp = get(p, "r") * std::sin(get(p, "theta"));
      return get(p, "s") * get(p, "t") - rp * rp;
    }
    case ModelFamily::dirac_scalar: {
      const double c = get(p, "c");
      const double mc2 = get(p, "m0") * c * c;
      const double cp = c * get(p, "hbar") * get(p, "kx");
      const double v0 = get(p, "v0");
      return cp * cp + mc2 * mc2 - v0 * v0;
    }
  }
  return 0.0;
}

MetricOperator model_spectral_metric(const ModelInstance& model, const Tolerances& tol) {
  const EigenAnalysis analysis = eigen_analysis(model.hamiltonian, tol);
  const BiorthSystem sys = biorthonormalize(analysis.pairs, Normalization::unit_left, tol, norm(model.hamiltonian));
  return spectral_metric(match_normalization(sys, model.analytic_pairs), model.hamiltonian, tol);
}

MetricOperator model_das_metric(const ModelInstance& model, const Tolerances& tol) {
  if (model.phase == Phase::broken) {
    throw Error(ErrorCode::broken_phase, "Das construction requires the unbroken phase");
  }
  if (model.phase == Phase::exceptional) {
    throw Error(ErrorCode::defective_system, "Das construction is undefined at an exceptional point");
  }
  if (!model.das_data) {
    throw Error(ErrorCode::invalid_construction, "model provides no Das generators at these parameters");
  }
  return das_metric(*model.das_data, model.hamiltonian, tol);
}

MetricOperator model_analytic_metric(const ModelInstance& model, const Tolerances& tol) {
  if (!model.analytic_metric) {
    if (model.phase == Phase::exceptional) {
      throw Error(ErrorCode::defective_system, "no metric at an exceptional point");
    }
    throw Error(ErrorCode::broken_phase, "no analytic metric outside the unbroken phase");
  }
  MetricOperator out{*model.analytic_metric, MetricMethod::analytic, {}};
  out.report = validate_metric(model.hamiltonian, out.matrix, tol);
  return out;
}

}  // namespace metricforge
