#pragma once

// Reference implementations used to check the optimizer: exhaustive
// offset-grid search priced by an exact min-cost flow, the angle-based
// trapezoid volume baseline, and a timing harness comparing model variants.

#include <functional>
#include <string>
#include <vector>

#include "vertalign/core.hpp"
#include "vertalign/geometry.hpp"
#include "vertalign/model.hpp"
#include "vertalign/solver.hpp"

namespace vertalign {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double step = 0.25;
  long cap = 2000000;  // maximum number of offset combinations
};

/// Volume of one side at a depth >= 0 below (cut) or above (fill) the ground.
using VolumeFunction = std::function<double(const SectionKey& key, Side side, double depth)>;

/// Volumes of the in-order slab fill, as seen by the slab model.
VolumeFunction slab_volume_function(const SlabSet& slabs);

struct BruteForceResult {
  bool feasible = false;
  double cost = kInf;
  std::vector<std::vector<double>> offsets;  // per road, per section
  std::vector<double> junction_offsets;
  long combinations = 0;
  long grade_feasible = 0;
};

/// Exhaustive search over grid offsets (multiples of grid.step inside each
/// section's bounds). Every road needs exactly segments + 2 sections so the
/// spline through the gridded elevations is unique. Earthwork is priced by a
/// min-cost flow over the haul graph with volumes bounded below by `volume`
/// and above by `caps`. Throws OracleError when the grid exceeds grid.cap.
BruteForceResult brute_force_optimum(const RoadNetwork& network, const VolumeFunction& volume,
                                     const CapSet& caps, const GridSpec& grid = {});

/// Cheapest earthwork allocation for fixed offsets, or +inf if infeasible.
double allocation_cost(const RoadNetwork& network, const VolumeFunction& volume, const CapSet& caps,
                       const std::vector<std::vector<double>>& offsets,
                       const std::vector<double>& junction_offsets);

struct AngleFit {
  TrapezoidGeometry geometry;
  double cut_r_squared = 1.0;
  double fill_r_squared = 1.0;
  bool flagged = false;  // poor trapezoid fit on either side
};

inline constexpr double kAngleFitFlag = 0.95;

/// Symmetric side slopes (alpha = beta) per side from a least-squares fit of
/// area(u) = W |u| + u^2 cot(alpha). A non-positive slope term clamps to
/// vertical walls. Throws OracleError when a side has no usable sample.
AngleFit angle_baseline_fit(const CrossSectionTable& table, double width, double section_length);

/// Quadratic volume bounds implied by an angle fit, usable as a CUVA fit set.
SideFits angle_fit_models(const AngleFit& fit, double lower, double upper);

enum class Variant { kUva, kCuva, kAngleBaseline };

const char* variant_name(Variant variant);
Variant parse_variant(const std::string& text);

struct CompareOptions {
  int runs = 5;
  int slabs = 20;
  FitMode fit = FitMode::kAuto;
  SolverOptions solver;
};

struct ComparisonRow {
  std::string variant;
  int roads = 0;
  int stations = 0;
  int intersections = 0;
  int slabs = 0;
  std::string status;
  double objective = 0.0;
  double mean_seconds = 0.0;
  double speedup = 1.0;          // base time / this time
  double cost_difference = 0.0;  // percent relative to the base objective
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  std::string to_csv() const;
};

/// Builds and solves every variant `runs` times; the first variant is the
/// base for speedup and cost difference.
ComparisonTable compare_models(const RoadNetwork& network, const CrossSectionSet& tables,
                               const std::vector<Variant>& variants, const CompareOptions& options = {});

}  // namespace vertalign
