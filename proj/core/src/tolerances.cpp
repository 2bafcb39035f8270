#include "metricforge/tolerances.hpp"

#include <array>

namespace metricforge {
namespace {

struct Field {
  const char* name;
  double Tolerances::*member;
};

constexpr std::array<Field, 15> kFields{{
    {"biorth", &Tolerances::biorth},
    {"cluster", &Tolerances::cluster},
    {"cmp", &Tolerances::cmp},
    {"cond_max", &Tolerances::cond_max},
    {"defect", &Tolerances::defect},
    {"eig", &Tolerances::eig},
    {"ep", &Tolerances::ep},
    {"exp", &Tolerances::exp},
    {"herm", &Tolerances::herm},
    {"inv", &Tolerances::inv},
    {"match", &Tolerances::match},
    {"max_qr_iters_per_dim", &Tolerances::max_qr_iters_per_dim},
    {"pos", &Tolerances::pos},
    {"real", &Tolerances::real},
    {"singular", &Tolerances::singular},
}};

}  // namespace

bool set_tolerance(Tolerances& tol, std::string_view name, double value) {
  for (const auto& field : kFields) {
    if (name == field.name) {
      tol.*field.member = value;
      return true;
    }
  }
  return false;
}

std::vector<std::pair<std::string, double>> tolerance_entries(const Tolerances& tol) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(kFields.size());
  for (const auto& field : kFields) out.emplace_back(field.name, tol.*field.member);
  return out;
}

}  // namespace metricforge
