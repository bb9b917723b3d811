#include <algorithm>
#include <cmath>
#include <sstream>

#include "vertalign/model.hpp"

namespace vertalign {
namespace {

// +1 for material entering the haul network, -1 for material leaving it.
int conservation_role(VarKind kind) {
  switch (kind) {
    case VarKind::kCutVolume:
    case VarKind::kJunctionCutVolume:
    case VarKind::kBorrowPlus:
    case VarKind::kBorrowMinus:
      return 1;
    case VarKind::kFillVolume:
    case VarKind::kJunctionFillVolume:
    case VarKind::kWastePlus:
    case VarKind::kWasteMinus:
      return -1;
    default:
      return 0;
  }
}

}  // namespace

double ResidualReport::max_residual() const {
  double r = std::max({bound_max, integrality_max, quadratic_max});
  for (const auto& [name, v] : family_max) r = std::max(r, v);
  return r;
}

double ResidualReport::max_conservation() const {
  double r = 0.0;
  for (double v : conservation) r = std::max(r, v);
  return r;
}

ResidualReport validate_solution(const ModelInstance& inst, const std::vector<double>& x,
                                 double tolerance, double conservation_tolerance) {
  if (static_cast<int>(x.size()) != inst.catalog.size()) {
    std::ostringstream os;
    os << "solution has " << x.size() << " values but the catalog has " << inst.catalog.size();
    throw ModelError(os.str());
  }
  ResidualReport rep;
  for (const auto& row : inst.linear) {
    double& slot = rep.family_max[family_name(row.family)];
    slot = std::max(slot, row.violation(x));
  }
  for (const auto& q : inst.quadratic) rep.quadratic_max = std::max(rep.quadratic_max, q.violation(x));
  if (!inst.quadratic.empty()) {
    double& slot = rep.family_max[family_name(ConstraintFamily::kVolumeFitted)];
    slot = std::max(slot, rep.quadratic_max);
  }

  int materials = 0;
  for (const auto& v : inst.catalog.variables()) materials = std::max(materials, v.material + 1);
  std::vector<double> sources(materials, 0.0);
  std::vector<double> sinks(materials, 0.0);
  for (int k = 0; k < inst.catalog.size(); ++k) {
    const Variable& v = inst.catalog[k];
    const double below = v.lower - x[k];
    const double above = x[k] - v.upper;
    rep.bound_max = std::max({rep.bound_max, below, above});
    if (v.integer) rep.integrality_max = std::max(rep.integrality_max, std::abs(x[k] - std::round(x[k])));
    const int role = conservation_role(v.kind);
    if (role > 0) sources[v.material] += x[k];
    if (role < 0) sinks[v.material] += x[k];
  }
  rep.family_max["bounds"] = rep.bound_max;
  for (int m = 0; m < materials; ++m) rep.conservation.push_back(std::abs(sources[m] - sinks[m]));

  for (const auto& [name, v] : rep.family_max) {
    if (v > tolerance) {
      std::ostringstream os;
      os << name << " residual " << v;
      rep.violations.push_back(os.str());
    }
  }
  if (rep.integrality_max > tolerance) {
    rep.violations.push_back("integrality gap " + std::to_string(rep.integrality_max));
  }
  for (int m = 0; m < materials; ++m) {
    if (rep.conservation[m] > conservation_tolerance) {
      std::ostringstream os;
      os << "material " << m + 1 << " conservation residual " << rep.conservation[m];
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace vertalign
