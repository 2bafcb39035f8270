#pragma once

#include <ostream>
#include <string>

#include "metricforge/dynamics.hpp"
#include "metricforge/phase.hpp"

namespace metricforge {

/// Number format used by every writer: %.17g.
std::string format_double(double x);

/// One row per point: axis values, classification, min_imag_gap,
/// metric_min_eig (empty when absent), defect_indicator, error.
void write_phase_csv(std::ostream& out, const PhaseDiagram& diagram);

/// t, re_0, im_0, ..., metric_norm, standard_norm
void write_evolution_csv(std::ostream& out, const EvolutionRecord& record);

/// theta, standard_re, standard_im, metric_re, metric_im, gain
void write_scan_csv(std::ostream& out, const OrthogonalityScan& scan);

}  // namespace metricforge
