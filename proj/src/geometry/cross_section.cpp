#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vertalign/geometry.hpp"

namespace vertalign {
namespace {

constexpr double kOffsetTol = 1e-9;

double monotone_tol(double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::string describe(const CrossSectionTable& t, const AreaSample& s) {
  std::ostringstream os;
  os << "road " << t.key.road + 1 << " section " << t.key.section + 1 << " material "
     << t.key.material + 1 << " offset " << s.offset;
  return os.str();
}

}  // namespace

const char* side_name(Side side) { return side == Side::kCut ? "cut" : "fill"; }

double CrossSectionTable::area(Side side, double u) const {
  if (samples.empty()) throw GeometryError("empty cross-section table");
  if (side == Side::kCut && u >= 0.0) return 0.0;
  if (side == Side::kFill && u <= 0.0) return 0.0;
  if (u < min_offset() - kOffsetTol || u > max_offset() + kOffsetTol) {
    std::ostringstream os;
    os << "offset " << u << " outside table range [" << min_offset() << ", " << max_offset() << "]";
    throw GeometryError(os.str());
  }
  auto value = [side](const AreaSample& s) { return side == Side::kCut ? s.cut_area : s.fill_area; };
  auto it = std::lower_bound(samples.begin(), samples.end(), u,
                             [](const AreaSample& s, double x) { return s.offset < x; });
  if (it == samples.begin()) return value(*it);
  if (it == samples.end()) return value(samples.back());
  const AreaSample& hi = *it;
  const AreaSample& lo = *(it - 1);
  const double w = (u - lo.offset) / (hi.offset - lo.offset);
  return value(lo) + w * (value(hi) - value(lo));
}

void normalize_table(CrossSectionTable& table) {
  auto& s = table.samples;
  std::sort(s.begin(), s.end(),
            [](const AreaSample& a, const AreaSample& b) { return a.offset < b.offset; });
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].offset == s[k - 1].offset) {
      throw GeometryError("duplicate offset at " + describe(table, s[k]));
    }
  }
  if (s.empty() || s.front().offset >= 0.0 || s.back().offset <= 0.0) {
    throw GeometryError("cross-section table must span negative and positive offsets");
  }
  auto zero = std::lower_bound(s.begin(), s.end(), 0.0,
                               [](const AreaSample& a, double x) { return a.offset < x; });
  if (zero->offset != 0.0) s.insert(zero, AreaSample{0.0, 0.0, 0.0});

  for (std::size_t k = 0; k < s.size(); ++k) {
    const AreaSample& a = s[k];
    if (!std::isfinite(a.offset) || !std::isfinite(a.cut_area) || !std::isfinite(a.fill_area)) {
      throw GeometryError("non-finite value at " + describe(table, a));
    }
    if (a.cut_area < 0.0 || a.fill_area < 0.0) {
      throw GeometryError("negative area at " + describe(table, a));
    }
    if (a.offset >= 0.0 && a.cut_area != 0.0) {
      throw GeometryError("cut area must vanish for non-negative offset at " + describe(table, a));
    }
    if (a.offset <= 0.0 && a.fill_area != 0.0) {
      throw GeometryError("fill area must vanish for non-positive offset at " + describe(table, a));
    }
    if (k == 0) continue;
    const AreaSample& p = s[k - 1];
    if (a.offset <= 0.0 && a.cut_area > p.cut_area + monotone_tol(a.cut_area, p.cut_area)) {
      throw GeometryError("cut area increases toward the ground line at " + describe(table, a));
    }
    if (p.offset >= 0.0 && a.fill_area < p.fill_area - monotone_tol(a.fill_area, p.fill_area)) {
      throw GeometryError("fill area decreases away from the ground line at " + describe(table, a));
    }
  }
}

double side_slope_cot(double angle) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (!(angle > 0.0) || angle > kHalfPi + 1e-12) {
    throw GeometryError("side-slope angle must lie in (0, pi/2]");
  }
  if (std::abs(angle - kHalfPi) <= 1e-12) return 0.0;
  return 1.0 / std::tan(angle);
}

double trapezoid_area(const TrapezoidGeometry& g, double u) {
  if (u == 0.0) return 0.0;
  const double kappa = u < 0.0 ? side_slope_cot(g.cut_alpha) + side_slope_cot(g.cut_beta)
                               : side_slope_cot(g.fill_alpha) + side_slope_cot(g.fill_beta);
  return g.width * std::abs(u) + 0.5 * u * u * kappa;
}

double trapezoid_volume(const TrapezoidGeometry& g, double u) {
  return trapezoid_area(g, u) * g.length;
}

CrossSectionTable trapezoid_table(const TrapezoidGeometry& g, double lower, double upper,
                                  int samples_per_side, SectionKey key) {
  if (samples_per_side < 2 || !(lower < 0.0) || !(upper > 0.0)) {
    throw GeometryError("trapezoid_table needs lower < 0 < upper and >= 2 samples per side");
  }
  CrossSectionTable t;
  t.key = key;
  const int n = samples_per_side - 1;
  for (int k = 0; k <= n; ++k) {
    const double u = lower * static_cast<double>(n - k) / n;
    t.samples.push_back({u, k == n ? 0.0 : trapezoid_area(g, u), 0.0});
  }
  for (int k = 1; k <= n; ++k) {
    const double u = upper * static_cast<double>(k) / n;
    t.samples.push_back({u, 0.0, trapezoid_area(g, u)});
  }
  return t;
}

}  // namespace vertalign
