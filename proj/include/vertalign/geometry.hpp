#pragma once

// Cross-section tables, slab approximations, trapezoid volumes, least-squares
// volume fits and the nested-mean error metrics.

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertalign {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Side { kCut, kFill };

const char* side_name(Side side);

struct SectionKey {
  int road = 0;
  int section = 0;
  int material = 0;

  auto operator<=>(const SectionKey&) const = default;
};

struct AreaSample {
  double offset = 0.0;
  double cut_area = 0.0;
  double fill_area = 0.0;
};

/// Sampled offset -> area data of one (road, section, material).
struct CrossSectionTable {
  SectionKey key;
  std::vector<AreaSample> samples;  // strictly increasing offsets

  double min_offset() const { return samples.front().offset; }
  double max_offset() const { return samples.back().offset; }
  /// Piecewise-linear area at offset u on one side; 0 on the opposite side.
  double area(Side side, double u) const;
};

using CrossSectionSet = std::map<SectionKey, CrossSectionTable>;

/// Sorts samples, inserts the (0, 0, 0) row if absent, and checks the sign and
/// monotonicity rules. Throws GeometryError naming the offending sample.
void normalize_table(CrossSectionTable& table);

struct SlabSide {
  std::vector<double> areas;    // A^k, volume per meter of depth
  std::vector<double> heights;  // h^k > 0, measured away from the ground line

  int count() const { return static_cast<int>(areas.size()); }
  double depth() const;
  /// Piecewise-linear volume after filling slabs in order to `depth`.
  double volume(double depth) const;
};

struct SlabApproximation {
  SlabSide cut;
  SlabSide fill;

  const SlabSide& side(Side s) const { return s == Side::kCut ? cut : fill; }
};

/// Uniform height bands over [min_offset, 0] and [0, max_offset]; each slab
/// area is the band's volume increment divided by its height. Non-increasing
/// neighbours are pooled so areas are strictly increasing.
SlabApproximation build_slabs(const CrossSectionTable& table, double section_length,
                              int cut_slabs, int fill_slabs);

SlabSide merge_non_increasing(const SlabSide& raw);

struct TrapezoidGeometry {
  double width = 0.0;
  double length = 0.0;
  double cut_alpha = 0.0;
  double cut_beta = 0.0;
  double fill_alpha = 0.0;
  double fill_beta = 0.0;

  static TrapezoidGeometry symmetric(double width, double length, double alpha, double beta) {
    return {width, length, alpha, beta, alpha, beta};
  }
};

/// cot(a); exactly 0 for vertical walls. Throws for a <= 0 or a > pi/2.
double side_slope_cot(double angle);

double trapezoid_volume(const TrapezoidGeometry& geom, double u);

/// Cross-section area (volume / length) of the trapezoid at u.
double trapezoid_area(const TrapezoidGeometry& geom, double u);

CrossSectionTable trapezoid_table(const TrapezoidGeometry& geom, double lower, double upper,
                                  int samples_per_side, SectionKey key = {});

struct VolumeSample {
  double offset = 0.0;
  double volume = 0.0;
};

enum class FitKind { kLinear, kQuadratic };

const char* fit_kind_name(FitKind kind);

/// Linear: V = chi[0] u + chi[1]. Quadratic: V = chi[0] u^2 + chi[1] u + chi[2].
struct FittedVolumeModel {
  FitKind kind = FitKind::kLinear;
  std::array<double, 3> chi{0.0, 0.0, 0.0};
  double r_squared = 1.0;
  Side side = Side::kCut;
  double domain_lo = 0.0;
  double domain_hi = 0.0;

  double evaluate(double u) const;
  /// Coefficients of a u^2 + b u + c regardless of kind.
  std::array<double, 3> quadratic_form() const;
};

FittedVolumeModel fit_linear(const std::vector<VolumeSample>& samples);
FittedVolumeModel fit_quadratic(const std::vector<VolumeSample>& samples);

/// Quadratic iff it explains strictly more variance than the line and its
/// leading coefficient is non-negative; otherwise linear.
FittedVolumeModel select_volume_model(const std::vector<VolumeSample>& samples, Side side);

enum class FitMode { kLinear, kQuadratic, kAuto };

/// Uniform grid of `count` offsets over the side's domain (u <= 0 for cut,
/// u >= 0 for fill), volume = area * length.
std::vector<VolumeSample> sample_volumes(const CrossSectionTable& table, double section_length,
                                         Side side, int count = 21);

/// Offsets grouped per section, one actual/predicted pair per offset.
using GroupedValues = std::vector<std::vector<double>>;

/// Mean over sections of the mean absolute percentage error over offsets.
/// Offsets with zero actual value are skipped, as are sections left empty.
double mape(const GroupedValues& actual, const GroupedValues& predicted);

/// Mean over sections of the per-section root mean squared error.
double rmse(const GroupedValues& actual, const GroupedValues& predicted);

struct ErrorMetrics {
  double mape_cut = 0.0;
  double mape_fill = 0.0;
  double rmse_cut = 0.0;
  double rmse_fill = 0.0;
};

using AreaPredictor = std::function<double(const SectionKey& key, Side side, double u)>;

/// MAPE and RMSE of predicted areas against every table sample, one section
/// per table. Cut uses the u < 0 samples, fill the u > 0 samples.
ErrorMetrics area_error_metrics(const CrossSectionSet& tables, const AreaPredictor& predicted);

}  // namespace vertalign
