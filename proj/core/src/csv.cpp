#include "metricforge/csv.hpp"

#include <cstdio>

namespace metricforge {
namespace {

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_phase_csv(std::ostream& out, const PhaseDiagram& d) {
  for (const auto& axis : d.axes) out << axis.name << ',';
  out << "classification,min_imag_gap,metric_min_eig,defect_indicator,error\n";
  for (const auto& p : d.points) {
    for (const auto& axis : d.axes) {
      auto it = p.params.find(axis.name);
      out << (it == p.params.end() ? std::string() : format_double(it->second)) << ',';
    }
    if (p.error) {
      out << "error,,,," << quoted(*p.error) << '\n';
      continue;
    }
    out << to_string(p.classification) << ',' << format_double(p.min_imag_gap) << ','
        << (p.metric_min_eig ? format_double(*p.metric_min_eig) : std::string()) << ','
        << format_double(p.defect_indicator) << ",\n";
  }
}

void write_evolution_csv(std::ostream& out, const EvolutionRecord& r) {
  const std::size_t dim = r.states.empty() ? 0 : r.states.front().dim();
  out << 't';
  for (std::size_t i = 0; i < dim; ++i) out << ",re_" << i << ",im_" << i;
  out << ",metric_norm,standard_norm\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << format_double(r.times[k]);
    for (std::size_t i = 0; i < dim; ++i) {
      out << ',' << format_double(r.states[k][i].real()) << ',' << format_double(r.states[k][i].imag());
    }
    out << ',' << format_double(r.metric_norms[k]) << ',' << format_double(r.standard_norms[k]) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const OrthogonalityScan& scan) {
  out << "theta,standard_re,standard_im,metric_re,metric_im,gain\n";
  for (const auto& row : scan.rows) {
    const auto& r = row.report;
    out << format_double(row.theta) << ',' << format_double(r.standard_overlap.real()) << ','
        << format_double(r.standard_overlap.imag()) << ',' << format_double(r.metric_overlap.real()) << ','
        << format_double(r.metric_overlap.imag()) << ',' << format_double(r.distinguishability_gain) << '\n';
  }
}

}  // namespace metricforge
