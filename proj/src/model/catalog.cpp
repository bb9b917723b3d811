#include <algorithm>
#include <cmath>

#include "vertalign/model.hpp"

namespace vertalign {
namespace {

struct Stem {
  const char* name;
  int arity;
};

Stem stem_of(VarKind kind, const VarIndex& idx) {
  switch (kind) {
    case VarKind::kSpline: return {"a", 3};
    case VarKind::kOffset: return {"u", 2};
    case VarKind::kJunctionOffset: return {"z", 1};
    case VarKind::kCutVolume: return {"VCUT", 4};
    case VarKind::kFillVolume: return {"VFILL", 4};
    case VarKind::kJunctionCutVolume: return {"UCUT", 3};
    case VarKind::kJunctionFillVolume: return {"UFILL", 3};
    case VarKind::kTransitPlus: return {"FTP", 4};
    case VarKind::kTransitMinus: return {"FTM", 4};
    case VarKind::kLoadPlus: return {"FLP", 4};
    case VarKind::kLoadMinus: return {"FLM", 4};
    case VarKind::kUnloadPlus: return {"FUP", 4};
    case VarKind::kUnloadMinus: return {"FUM", 4};
    case VarKind::kBorrowPlus: return {"FBP", 3};
    case VarKind::kBorrowMinus: return {"FBM", 3};
    case VarKind::kWastePlus: return {"FWP", 3};
    case VarKind::kWasteMinus: return {"FWM", 3};
    case VarKind::kJunctionIn: return {"FIN", 4};
    case VarKind::kJunctionOut: return {"FOUT", 4};
    case VarKind::kJunctionLoad: return {"FLE", 3};
    case VarKind::kJunctionUnload: return {"FUE", 3};
    case VarKind::kSlabDepth: return {idx[3] == 0 ? "DCUT" : "DFILL", -1};
    case VarKind::kSlabSelect: return {idx[3] == 0 ? "BCUT" : "BFILL", -1};
    case VarKind::kJunctionSlabDepth: return {idx[2] == 0 ? "DECUT" : "DEFILL", -2};
    case VarKind::kJunctionSlabSelect: return {idx[2] == 0 ? "BECUT" : "BEFILL", -2};
  }
  return {"X", 5};
}

}  // namespace

const char* family_name(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kContinuity: return "continuity";
    case ConstraintFamily::kIntersectionElevation: return "intersection-elevation";
    case ConstraintFamily::kGap: return "gap";
    case ConstraintFamily::kIntersectionOffset: return "intersection-offset";
    case ConstraintFamily::kGrade: return "grade";
    case ConstraintFamily::kFlow: return "flow";
    case ConstraintFamily::kBalance: return "balance";
    case ConstraintFamily::kVolumeSlab: return "volume-slab";
    case ConstraintFamily::kVolumeFitted: return "volume-fitted";
    case ConstraintFamily::kCapacity: return "capacity";
  }
  return "unknown";
}

const char* model_kind_name(ModelKind kind) { return kind == ModelKind::kUva ? "uva" : "cuva"; }

std::string variable_name(VarKind kind, const VarIndex& idx) {
  const Stem stem = stem_of(kind, idx);
  std::string name = stem.name;
  std::vector<int> parts;
  if (stem.arity == -1) {
    parts = {idx[0], idx[1], idx[2], idx[4]};
  } else if (stem.arity == -2) {
    parts = {idx[0], idx[1], idx[3]};
  } else {
    parts.assign(idx.begin(), idx.begin() + stem.arity);
  }
  for (int p : parts) name += "_" + std::to_string(p + 1);
  return name;
}

int VariableCatalog::add(VarKind kind, VarIndex index, double lower, double upper, bool integer,
                         int material) {
  auto key = std::make_pair(kind, index);
  if (lookup_.count(key)) throw ModelError("duplicate variable " + variable_name(kind, index));
  const int k = size();
  Variable v;
  v.name = variable_name(kind, index);
  v.kind = kind;
  v.index = index;
  v.lower = lower;
  v.upper = upper;
  v.integer = integer;
  v.material = material;
  by_name_[v.name] = k;
  vars_.push_back(std::move(v));
  lookup_.emplace(key, k);
  return k;
}

int VariableCatalog::find(VarKind kind, const VarIndex& index) const {
  auto it = lookup_.find({kind, index});
  return it == lookup_.end() ? -1 : it->second;
}

int VariableCatalog::at(VarKind kind, const VarIndex& index) const {
  const int k = find(kind, index);
  if (k < 0) throw ModelError("missing variable " + variable_name(kind, index));
  return k;
}

int VariableCatalog::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

double LinearConstraint::activity(const std::vector<double>& x) const {
  double a = 0.0;
  for (const auto& [j, c] : terms) a += c * x[j];
  return a;
}

double LinearConstraint::violation(const std::vector<double>& x) const {
  const double a = activity(x);
  switch (relation) {
    case Relation::kLessEqual: return std::max(0.0, a - rhs);
    case Relation::kGreaterEqual: return std::max(0.0, rhs - a);
    case Relation::kEqual: return std::abs(a - rhs);
  }
  return 0.0;
}

double QuadraticConstraint::violation(const std::vector<double>& x) const {
  double v = 0.0;
  for (int j : volume_vars) v += x[j];
  const double u = x[offset_var];
  return std::max(0.0, chi1 * u * u + chi2 * u + chi3 - v);
}

int ModelInstance::integer_count() const {
  const auto& vars = catalog.variables();
  return static_cast<int>(
      std::count_if(vars.begin(), vars.end(), [](const Variable& v) { return v.integer; }));
}

std::map<ConstraintFamily, int> ModelInstance::family_counts() const {
  std::map<ConstraintFamily, int> counts;
  for (const auto& row : linear) ++counts[row.family];
  if (!quadratic.empty()) counts[ConstraintFamily::kVolumeFitted] += static_cast<int>(quadratic.size());
  return counts;
}

}  // namespace vertalign
