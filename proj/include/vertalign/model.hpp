#pragma once

// Assembly of the unified MILP (UVA) and convex QCQP (CUVA) instances.
// Variable and row names are 1-based, e.g. GAP_2_7 is road 2, section 7.

#include <array>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "vertalign/core.hpp"
#include "vertalign/geometry.hpp"

namespace vertalign {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConstraintFamily {
  kContinuity,
  kIntersectionElevation,
  kGap,
  kIntersectionOffset,
  kGrade,
  kFlow,
  kBalance,
  kVolumeSlab,
  kVolumeFitted,
  kCapacity,
};

const char* family_name(ConstraintFamily family);

enum class VarKind {
  kSpline,          // (road, segment, coefficient)
  kOffset,          // (road, section)
  kJunctionOffset,  // (intersection)
  kCutVolume,       // (road, section, material, haul)
  kFillVolume,
  kJunctionCutVolume,  // (intersection, material, haul)
  kJunctionFillVolume,
  kTransitPlus,  // (road, arc, material, haul); arc j joins sections j and j+1
  kTransitMinus,
  kLoadPlus,  // (road, section, material, haul)
  kLoadMinus,
  kUnloadPlus,
  kUnloadMinus,
  kBorrowPlus,  // (pit, material, haul)
  kBorrowMinus,
  kWastePlus,
  kWasteMinus,
  kJunctionIn,  // (intersection, attachment, material, haul)
  kJunctionOut,
  kJunctionLoad,  // (intersection, material, haul)
  kJunctionUnload,
  kSlabDepth,  // (road, section, material, side, slab); side 0 cut, 1 fill
  kSlabSelect,
  kJunctionSlabDepth,  // (intersection, material, side, slab)
  kJunctionSlabSelect,
};

using VarIndex = std::array<int, 5>;

/// 1-based name such as VCUT_2_7_1_3; slab kinds take their stem from the side.
std::string variable_name(VarKind kind, const VarIndex& index);

struct Variable {
  std::string name;
  VarKind kind = VarKind::kOffset;
  VarIndex index{};
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  int material = -1;
};

class VariableCatalog {
 public:
  int add(VarKind kind, VarIndex index, double lower, double upper, bool integer = false,
          int material = -1);
  /// -1 if absent.
  int find(VarKind kind, const VarIndex& index) const;
  /// Throws ModelError if absent.
  int at(VarKind kind, const VarIndex& index) const;
  int index_of(const std::string& name) const;

  int size() const { return static_cast<int>(vars_.size()); }
  const Variable& operator[](int k) const { return vars_[k]; }
  Variable& operator[](int k) { return vars_[k]; }
  const std::vector<Variable>& variables() const { return vars_; }

 private:
  std::vector<Variable> vars_;
  std::map<std::pair<VarKind, VarIndex>, int> lookup_;
  std::map<std::string, int> by_name_;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::string name;
  ConstraintFamily family = ConstraintFamily::kGap;
  std::vector<std::pair<int, double>> terms;  // no zero coefficients
  Relation relation = Relation::kEqual;
  double rhs = 0.0;

  double activity(const std::vector<double>& x) const;
  /// Amount by which x violates the row (0 when satisfied).
  double violation(const std::vector<double>& x) const;
};

/// sum(volume_vars) >= chi1 u^2 + chi2 u + chi3 with u = offset_var.
struct QuadraticConstraint {
  std::string name;
  std::vector<int> volume_vars;
  int offset_var = -1;
  double chi1 = 0.0;
  double chi2 = 0.0;
  double chi3 = 0.0;

  double violation(const std::vector<double>& x) const;
};

/// Incremental slab encoding of one (owner, material, side): depth variables
/// filled in order, select_vars[k] = 1 opens slab k+1.
struct IncrementalBlock {
  std::vector<int> depth_vars;
  std::vector<int> select_vars;
  std::vector<double> heights;
};

enum class ModelKind { kUva, kCuva };

const char* model_kind_name(ModelKind kind);

struct ModelInstance {
  ModelKind kind = ModelKind::kUva;
  VariableCatalog catalog;
  std::vector<LinearConstraint> linear;
  std::vector<QuadraticConstraint> quadratic;
  std::vector<double> objective;
  std::vector<IncrementalBlock> blocks;

  int integer_count() const;
  std::map<ConstraintFamily, int> family_counts() const;
};

// Volume data keyed per (road, section, material). Intersections use the key
// of their first attachment.
struct SideFits {
  FittedVolumeModel cut;
  FittedVolumeModel fill;
};

struct VolumeCaps {
  double cut = kInf;
  double fill = kInf;
};

using SlabSet = std::map<SectionKey, SlabApproximation>;
using FitSet = std::map<SectionKey, SideFits>;
using CapSet = std::map<SectionKey, VolumeCaps>;

/// Key of the cross-section data used for intersection e.
SectionKey junction_key(const RoadNetwork& network, int e, int material);

/// True if (road, section) is attached to an intersection.
bool is_attached(const NetworkIndex& index, int road, int section);

/// Checks that every section has a table per material covering its offset
/// bounds. Throws ModelError otherwise.
void check_tables(const RoadNetwork& network, const CrossSectionSet& tables);

SlabSet make_slabs(const RoadNetwork& network, const CrossSectionSet& tables, int cut_slabs,
                   int fill_slabs);

/// Fits both sides of every table and makes each side's bound non-positive on
/// the opposite side's offset range (quadratic falls back to linear, then the
/// slope and constant are clamped).
FitSet fit_volume_models(const RoadNetwork& network, const CrossSectionSet& tables, FitMode mode,
                         int samples_per_side = 21);

/// max(1.1 x table volume at the extreme offset, 1 m^3), or the configured cap.
CapSet volume_caps(const RoadNetwork& network, const CrossSectionSet& tables);

/// Offsets, spline coefficients, volumes and flows shared by both models.
VariableCatalog base_catalog(const RoadNetwork& network, const CapSet& caps);

std::vector<LinearConstraint> emit_profile_constraints(const RoadNetwork& network,
                                                       const VariableCatalog& catalog);
std::vector<LinearConstraint> emit_flow_constraints(const RoadNetwork& network,
                                                    const VariableCatalog& catalog);
std::vector<LinearConstraint> emit_balance_constraints(const RoadNetwork& network,
                                                       const VariableCatalog& catalog);
std::vector<LinearConstraint> emit_capacity_constraints(const RoadNetwork& network,
                                                        const VariableCatalog& catalog);

struct SlabVolumeBlock {
  std::vector<LinearConstraint> rows;
  std::vector<IncrementalBlock> blocks;
};

/// Adds depth and select variables to the catalog.
SlabVolumeBlock emit_volume_milp(const RoadNetwork& network, const SlabSet& slabs,
                                 VariableCatalog& catalog);

struct FittedVolumeBlock {
  std::vector<LinearConstraint> linear;
  std::vector<QuadraticConstraint> quadratic;
};

FittedVolumeBlock emit_volume_fitted(const RoadNetwork& network, const FitSet& fits,
                                     const VariableCatalog& catalog);

std::vector<double> assemble_objective(const RoadNetwork& network, const VariableCatalog& catalog);

ModelInstance build_uva(const RoadNetwork& network, const SlabSet& slabs, const CapSet& caps);
ModelInstance build_cuva(const RoadNetwork& network, const FitSet& fits, const CapSet& caps);

struct ResidualReport {
  std::map<std::string, double> family_max;  // family name -> max violation
  double bound_max = 0.0;
  double integrality_max = 0.0;
  double quadratic_max = 0.0;
  std::vector<double> conservation;  // per material |cut + borrow - fill - waste|
  std::vector<std::string> violations;

  double max_residual() const;
  double max_conservation() const;
  bool ok() const { return violations.empty(); }
};

/// Per-family residuals of x against the instance. Throws ModelError when the
/// dimension does not match the catalog.
ResidualReport validate_solution(const ModelInstance& instance, const std::vector<double>& x,
                                 double tolerance = 1e-6, double conservation_tolerance = 1e-8);

}  // namespace vertalign
