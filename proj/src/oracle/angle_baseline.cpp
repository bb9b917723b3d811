#include <cmath>
#include <numbers>

#include "vertalign/oracle.hpp"

namespace vertalign {
namespace {

struct SideFit {
  double cot = 0.0;
  double r_squared = 1.0;
};

// Least squares of area - W|u| against u^2, clamped to cot >= 0.
SideFit fit_side(const CrossSectionTable& table, Side side, double width) {
  double num = 0.0, den = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (const AreaSample& s : table.samples) {
    const bool on_side = side == Side::kCut ? s.offset < 0.0 : s.offset > 0.0;
    if (!on_side) continue;
    const double a = side == Side::kCut ? s.cut_area : s.fill_area;
    const double u2 = s.offset * s.offset;
    num += (a - width * std::abs(s.offset)) * u2;
    den += u2 * u2;
    pts.emplace_back(s.offset, a);
  }
  if (pts.empty() || den == 0.0) {
    throw OracleError(std::string("no ") + side_name(side) + " samples to fit side slopes");
  }
  SideFit fit;
  fit.cot = std::max(num / den, 0.0);
  double mean = 0.0;
  for (const auto& [u, a] : pts) mean += a;
  mean /= static_cast<double>(pts.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (const auto& [u, a] : pts) {
    const double pred = width * std::abs(u) + fit.cot * u * u;
    ss_res += (a - pred) * (a - pred);
    ss_tot += (a - mean) * (a - mean);
  }
  fit.r_squared = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

double angle_of(double cot) { return cot == 0.0 ? std::numbers::pi / 2.0 : std::atan(1.0 / cot); }

FittedVolumeModel side_model(double length, double width, double cot, Side side, double near,
                             double far) {
  const double sign = side == Side::kCut ? -1.0 : 1.0;
  FittedVolumeModel m;
  m.side = side;
  m.domain_lo = std::min(0.0, near);
  m.domain_hi = std::max(0.0, near);
  if (cot > 0.0) {
    m.kind = FitKind::kQuadratic;
    m.chi = {length * cot, sign * length * width, 0.0};
    if (m.evaluate(far) <= 0.0) return m;
    // Positive beyond the ground line: fall back to the secant through the
    // origin and the deepest point.
    const double v = m.evaluate(near);
    m.kind = FitKind::kLinear;
    m.chi = {near == 0.0 ? 0.0 : v / near, 0.0, 0.0};
    return m;
  }
  m.kind = FitKind::kLinear;
  m.chi = {sign * length * width, 0.0, 0.0};
  return m;
}

}  // namespace

AngleFit angle_baseline_fit(const CrossSectionTable& table, double width, double section_length) {
  if (table.samples.size() < 2) throw OracleError("cross-section table too small for an angle fit");
  if (!(width >= 0.0) || !(section_length > 0.0)) throw OracleError("width and length must be positive");
  const SideFit cut = fit_side(table, Side::kCut, width);
  const SideFit fill = fit_side(table, Side::kFill, width);
  AngleFit out;
  out.geometry = {width, section_length, angle_of(cut.cot), angle_of(cut.cot), angle_of(fill.cot),
                  angle_of(fill.cot)};
  out.cut_r_squared = cut.r_squared;
  out.fill_r_squared = fill.r_squared;
  out.flagged = cut.r_squared < kAngleFitFlag || fill.r_squared < kAngleFitFlag;
  return out;
}

SideFits angle_fit_models(const AngleFit& fit, double lower, double upper) {
  const TrapezoidGeometry& g = fit.geometry;
  SideFits out;
  out.cut = side_model(g.length, g.width, side_slope_cot(g.cut_alpha), Side::kCut, lower, upper);
  out.fill = side_model(g.length, g.width, side_slope_cot(g.fill_alpha), Side::kFill, upper, lower);
  out.cut.r_squared = fit.cut_r_squared;
  out.fill.r_squared = fit.fill_r_squared;
  return out;
}

}  // namespace vertalign
