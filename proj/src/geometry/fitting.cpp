#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "vertalign/geometry.hpp"

namespace vertalign {
namespace {

int distinct_offsets(const std::vector<VolumeSample>& samples) {
  std::set<double> xs;
  for (const auto& s : samples) xs.insert(s.offset);
  return static_cast<int>(xs.size());
}

FittedVolumeModel least_squares(const std::vector<VolumeSample>& samples, int degree) {
  const int n = static_cast<int>(samples.size());
  const int cols = degree + 1;
  Eigen::MatrixXd a(n, cols);
  Eigen::VectorXd b(n);
  double lo = samples.front().offset;
  double hi = lo;
  for (int r = 0; r < n; ++r) {
    const double u = samples[r].offset;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    double p = 1.0;
    for (int c = cols - 1; c >= 0; --c) {
      a(r, c) = p;
      p *= u;
    }
    b(r) = samples[r].volume;
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);

  FittedVolumeModel fit;
  fit.kind = degree == 1 ? FitKind::kLinear : FitKind::kQuadratic;
  for (int c = 0; c < cols; ++c) fit.chi[c] = x(c);
  fit.domain_lo = lo;
  fit.domain_hi = hi;

  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * x - b).squaredNorm();
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace

const char* fit_kind_name(FitKind kind) { return kind == FitKind::kLinear ? "linear" : "quadratic"; }

double FittedVolumeModel::evaluate(double u) const {
  const auto q = quadratic_form();
  return (q[0] * u + q[1]) * u + q[2];
}

std::array<double, 3> FittedVolumeModel::quadratic_form() const {
  if (kind == FitKind::kLinear) return {0.0, chi[0], chi[1]};
  return chi;
}

FittedVolumeModel fit_linear(const std::vector<VolumeSample>& samples) {
  if (distinct_offsets(samples) < 2) {
    throw GeometryError("linear fit needs at least 2 distinct offsets");
  }
  return least_squares(samples, 1);
}

FittedVolumeModel fit_quadratic(const std::vector<VolumeSample>& samples) {
  if (distinct_offsets(samples) < 3) {
    throw GeometryError("quadratic fit needs at least 3 distinct offsets");
  }
  return least_squares(samples, 2);
}

FittedVolumeModel select_volume_model(const std::vector<VolumeSample>& samples, Side side) {
  FittedVolumeModel linear = fit_linear(samples);
  linear.side = side;
  if (distinct_offsets(samples) < 3) return linear;
  FittedVolumeModel quad = fit_quadratic(samples);
  quad.side = side;
  constexpr double kTie = 1e-12;
  if (quad.chi[0] >= 0.0 && quad.r_squared > linear.r_squared + kTie) return quad;
  return linear;
}

std::vector<VolumeSample> sample_volumes(const CrossSectionTable& table, double section_length,
                                         Side side, int count) {
  if (count < 2) throw GeometryError("need at least 2 samples per side");
  const double end = side == Side::kCut ? table.min_offset() : table.max_offset();
  std::vector<VolumeSample> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double u = end * static_cast<double>(count - 1 - k) / (count - 1);
    out.push_back({u, section_length * table.area(side, u)});
  }
  if (side == Side::kFill) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace vertalign
