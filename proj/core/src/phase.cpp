#include "metricforge/phase.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "metricforge/errors.hpp"
#include "metricforge/metric.hpp"

namespace metricforge {

PhasePoint classify(const ComplexMatrix& h, const Tolerances& tol) {
  PhasePoint point;
  const EigenAnalysis analysis = eigen_analysis(h, tol);
  const double h_norm = norm(h);
  for (const auto& p : analysis.pairs) point.min_imag_gap = std::max(point.min_imag_gap, std::abs(p.value.imag()));
  point.defect_indicator = analysis.defect_indicator;

  if (analysis.defect_indicator < tol.defect) {
    point.classification = Phase::exceptional;
  } else if (point.min_imag_gap > tol.real * h_norm) {
    point.classification = Phase::broken;
  } else {
    try {
      const BiorthSystem sys = biorthonormalize(analysis.pairs, Normalization::unit_left, tol, h_norm);
      point.metric_min_eig = spectral_metric(sys, h, tol).report.min_metric_eigenvalue;
      point.classification = Phase::unbroken;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::defective_system) throw;
      point.classification = Phase::exceptional;
    }
  }
  return point;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {start};
  std::vector<double> out(count);
  const double span = stop - start;
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + span * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = stop;
  return out;
}

namespace {

std::vector<std::size_t> grid_shape(const std::vector<Axis>& axes) {
  std::vector<std::size_t> shape;
  for (const auto& a : axes) shape.push_back(a.values.size());
  return shape;
}

ParamMap params_at(const ParamMap& base, const std::vector<Axis>& axes, std::size_t flat) {
  ParamMap p = base;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t n = axes[k].values.size();
    p[axes[k].name] = axes[k].values[flat % n];
    flat /= n;
  }
  return p;
}

}  // namespace

PhaseDiagram sweep(ModelFamily family, const ParamMap& base, const std::vector<Axis>& axes,
                   const Tolerances& tol, unsigned threads) {
  if (axes.empty()) throw Error(ErrorCode::invalid_argument, "sweep: no axes");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw Error(ErrorCode::invalid_argument, "sweep: axis '" + a.name + "' is empty");
    total *= a.values.size();
  }
  PhaseDiagram diagram{family, base, axes, std::vector<PhasePoint>(total)};

  auto evaluate = [&](std::size_t i) {
    PhasePoint& slot = diagram.points[i];
    ParamMap p = params_at(base, axes, i);
    try {
      const ModelInstance model = make_model(family, p);
      slot = classify(model.hamiltonian, tol);
      slot.params = model.params;
    } catch (const std::exception& e) {
      slot = PhasePoint{};
      slot.params = std::move(p);
      slot.error = e.what();
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate(i);
    return diagram;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) evaluate(i);
    });
  }
  for (auto& t : pool) t.join();
  return diagram;
}

namespace {

// Shrinks [lo, hi] to `width` (0 runs down to adjacent doubles) and returns
// the endpoint closer to the sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi, double width) {
  if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "find_exceptional: need lo < hi");
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::no_bracket, "find_exceptional: both ends lie in the same phase");
  }
  double a = lo, b = hi;
  while (b - a > width) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      a = mid;
      f_lo = f_mid;
    } else {
      b = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? a : b;
}

}  // namespace

double find_exceptional(ModelFamily family, const ParamMap& base, const std::string& param, double lo,
                        double hi, const Tolerances&) {
  ParamMap p = base;
  return bisect(
      [&](double x) {
        p[param] = x;
        return model_discriminant(family, p);
      },
      lo, hi, 0.0);
}

double find_exceptional(const std::function<ComplexMatrix(double)>& family, double lo, double hi,
                        const Tolerances& tol) {
  return bisect(
      [&](double x) {
        const ComplexMatrix h = family(x);
        const EigenAnalysis analysis = eigen_analysis(h, tol);
        double gap = 0.0;
        for (const auto& p : analysis.pairs) gap = std::max(gap, std::abs(p.value.imag()));
        // Positive on the unbroken side, like the analytic discriminants.
        return tol.real * norm(h) - gap;
      },
      lo, hi, tol.ep * (hi - lo));
}

std::vector<EpBracket> ep_brackets(const PhaseDiagram& d) {
  const auto shape = grid_shape(d.axes);
  std::vector<std::size_t> stride(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) stride[k - 1] = stride[k] * shape[k];

  std::vector<EpBracket> out;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const std::size_t coord = (i / stride[k]) % shape[k];
      if (coord + 1 >= shape[k]) continue;
      const PhasePoint& a = d.points[i];
      const PhasePoint& b = d.points[i + stride[k]];
      if (a.error || b.error || a.classification == b.classification) continue;
      out.push_back({d.axes[k].name, a.params, d.axes[k].values[coord], d.axes[k].values[coord + 1],
                     a.classification, b.classification});
    }
  }
  return out;
}

}  // namespace metricforge
