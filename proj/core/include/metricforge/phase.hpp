#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metricforge/linalg.hpp"
#include "metricforge/models.hpp"

namespace metricforge {

struct PhasePoint {
  ParamMap params;
  Phase classification = Phase::unbroken;
  double min_imag_gap = 0.0;  // max |Im E| over the spectrum
  std::optional<double> metric_min_eig;
  double defect_indicator = 0.0;
  std::optional<std::string> error;  // set when the point could not be evaluated
};

/// unbroken: all |Im E| <= tol.real * ||H|| and defect_indicator >= tol.defect.
/// exceptional: defect_indicator < tol.defect (takes precedence).
/// broken: otherwise. metric_min_eig is filled on unbroken points from the
/// unit-left spectral metric.
PhasePoint classify(const ComplexMatrix& h, const Tolerances& tol = {});

struct Axis {
  std::string name;
  std::vector<double> values;
};

/// count evenly spaced values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, std::size_t count);

struct PhaseDiagram {
  ModelFamily family = ModelFamily::jc_doublet;
  ParamMap base;
  std::vector<Axis> axes;
  std::vector<PhasePoint> points;  // row-major: the last axis varies fastest
};

/// Classifies every grid point. Points are evaluated on `threads` workers
/// (0 = hardware concurrency) and stored in grid order, so the result does not
/// depend on scheduling. Per-point failures are recorded, never thrown.
PhaseDiagram sweep(ModelFamily family, const ParamMap& base, const std::vector<Axis>& axes,
                   const Tolerances& tol = {}, unsigned threads = 0);

/// Parameter value where the model's analytic discriminant changes sign.
/// Bisection continues down to adjacent doubles (well inside tol.ep * (hi - lo))
/// and returns the endpoint with the smaller |discriminant|. Throws NoBracket
/// when the discriminant has the same sign at both ends.
double find_exceptional(ModelFamily family, const ParamMap& base, const std::string& param, double lo,
                        double hi, const Tolerances& tol = {});

/// Numeric variant for arbitrary families: bisects on
/// max|Im E| - tol.real * ||H(x)||.
double find_exceptional(const std::function<ComplexMatrix(double)>& family, double lo, double hi,
                        const Tolerances& tol = {});

struct EpBracket {
  std::string axis;
  ParamMap at;  // coordinates of the lower grid point
  double lo = 0.0;
  double hi = 0.0;
  Phase from = Phase::unbroken;
  Phase to = Phase::broken;
};

/// Consecutive grid points along any axis whose classifications differ.
std::vector<EpBracket> ep_brackets(const PhaseDiagram& diagram);

}  // namespace metricforge
