#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vertalign/geometry.hpp"

using namespace vertalign;

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Plain normal equations solved by Gaussian elimination with partial pivoting.
std::vector<double> normal_equations(const std::vector<VolumeSample>& s, int degree) {
  const int n = degree + 1;
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (const auto& p : s) {
    std::vector<double> row(n);
    for (int c = 0; c < n; ++c) row[c] = std::pow(p.offset, degree - c);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m[r][c] += row[r] * row[c];
      m[r][n] += row[r] * p.volume;
    }
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<double> x(n);
  for (int c = 0; c < n; ++c) x[c] = m[c][n] / m[c][c];
  return x;
}

std::vector<VolumeSample> on_poly(const std::vector<double>& us, double a, double b, double c) {
  std::vector<VolumeSample> s;
  for (double u : us) s.push_back({u, (a * u + b) * u + c});
  return s;
}

CrossSectionTable linear_table(double lower, double upper, double width) {
  CrossSectionTable t;
  for (int k = 0; k <= 8; ++k) {
    const double u = lower + (upper - lower) * k / 8.0;
    t.samples.push_back({u, u < 0 ? -width * u : 0.0, u > 0 ? width * u : 0.0});
  }
  return t;
}

}  // namespace

TEST(TrapezoidVolume, HandValues) {
  const auto vertical = TrapezoidGeometry::symmetric(10.0, 1.0, kHalfPi, kHalfPi);
  EXPECT_DOUBLE_EQ(trapezoid_volume(vertical, -2.0), 20.0);
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, kQuarterPi, kQuarterPi);
  EXPECT_NEAR(trapezoid_volume(g, -2.0), 24.0, 1e-12);
  EXPECT_NEAR(trapezoid_volume(g, 2.0), 24.0, 1e-12);
  EXPECT_EQ(trapezoid_volume(g, 0.0), 0.0);
  const auto scaled = TrapezoidGeometry::symmetric(10.0, 3.0, kQuarterPi, kQuarterPi);
  EXPECT_NEAR(trapezoid_volume(scaled, -2.0), 72.0, 1e-12);
}

TEST(TrapezoidVolume, SingularAngleRejected) {
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, 0.0, kQuarterPi);
  EXPECT_THROW(trapezoid_volume(g, -1.0), GeometryError);
  EXPECT_THROW(side_slope_cot(2.0), GeometryError);
  EXPECT_EQ(side_slope_cot(kHalfPi), 0.0);
}

TEST(CrossSectionTable, NormalizeSortsAndInsertsZero) {
  CrossSectionTable t;
  t.samples = {{1.0, 0.0, 5.0}, {-1.0, 4.0, 0.0}, {-2.0, 9.0, 0.0}};
  normalize_table(t);
  ASSERT_EQ(t.samples.size(), 4u);
  EXPECT_EQ(t.samples[0].offset, -2.0);
  EXPECT_EQ(t.samples[2].offset, 0.0);
  EXPECT_NEAR(t.area(Side::kCut, -1.5), 6.5, 1e-12);
  EXPECT_EQ(t.area(Side::kCut, 0.5), 0.0);
  EXPECT_NEAR(t.area(Side::kFill, 0.5), 2.5, 1e-12);
}

TEST(CrossSectionTable, NonMonotoneRejectedWithSample) {
  CrossSectionTable t;
  t.samples = {{-2.0, 3.0, 0.0}, {-1.0, 4.0, 0.0}, {0.0, 0.0, 0.0}, {1.0, 0.0, 1.0}};
  try {
    normalize_table(t);
    FAIL() << "expected rejection";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("offset -1"), std::string::npos) << e.what();
  }
}

TEST(CrossSectionTable, WrongSideAreaRejected) {
  CrossSectionTable t;
  t.samples = {{-1.0, 1.0, 0.5}, {0.0, 0.0, 0.0}, {1.0, 0.0, 1.0}};
  EXPECT_THROW(normalize_table(t), GeometryError);
}

TEST(BuildSlabs, TrapezoidTwoSlabs) {
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, kQuarterPi, kQuarterPi);
  const auto t = trapezoid_table(g, -2.0, 2.0, 3);
  const auto s = build_slabs(t, 1.0, 2, 2);
  ASSERT_EQ(s.cut.count(), 2);
  EXPECT_NEAR(s.cut.areas[0], 11.0, 1e-12);
  EXPECT_NEAR(s.cut.areas[1], 13.0, 1e-12);
  EXPECT_NEAR(s.cut.heights[0] + s.cut.heights[1], 2.0, 1e-12);
  EXPECT_NEAR(s.cut.volume(2.0), 24.0, 1e-12);
}

TEST(BuildSlabs, RectangleMergesToOne) {
  for (int n : {1, 3, 17}) {
    const auto s = build_slabs(linear_table(-2.0, 1.5, 7.0), 2.0, n, n);
    ASSERT_EQ(s.cut.count(), 1);
    ASSERT_EQ(s.fill.count(), 1);
    EXPECT_NEAR(s.cut.areas[0], 14.0, 1e-9);
    EXPECT_NEAR(s.cut.depth(), 2.0, 1e-12);
    EXPECT_NEAR(s.fill.depth(), 1.5, 1e-12);
  }
}

TEST(BuildSlabs, HundredSlabsWithinOnePercent) {
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, kQuarterPi, kQuarterPi);
  const auto t = trapezoid_table(g, -2.0, 2.0, 2001);
  const auto s = build_slabs(t, 1.0, 100, 100);
  EXPECT_NEAR(s.cut.volume(2.0), 24.0, 0.24);
  EXPECT_NEAR(s.cut.volume(1.234), trapezoid_volume(g, -1.234), 0.01 * trapezoid_volume(g, -1.234));
}

TEST(BuildSlabs, AreasStrictlyIncreaseAndHeightsSpan) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(4.0, 14.0), a(0.4, 1.5), lo(-4.0, -0.5), hi(0.5, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    TrapezoidGeometry g{w(rng), 1.0, a(rng), a(rng), a(rng), a(rng)};
    const double l = lo(rng), u = hi(rng);
    const auto s = build_slabs(trapezoid_table(g, l, u, 9), 25.0, 1 + trial % 7, 1 + trial % 5);
    for (const SlabSide* side : {&s.cut, &s.fill}) {
      for (int k = 1; k < side->count(); ++k) EXPECT_GT(side->areas[k], side->areas[k - 1]);
      for (double h : side->heights) EXPECT_GT(h, 0.0);
      EXPECT_GT(side->areas.front(), 0.0);
    }
    EXPECT_NEAR(s.cut.depth(), -l, 1e-9);
    EXPECT_NEAR(s.fill.depth(), u, 1e-9);
  }
}

TEST(BuildSlabs, MergeOfEqualNeighbours) {
  SlabSide raw{{3.0, 3.0, 2.0, 5.0}, {1.0, 1.0, 2.0, 1.0}};
  const auto m = merge_non_increasing(raw);
  ASSERT_EQ(m.count(), 2);
  EXPECT_NEAR(m.areas[0], 2.5, 1e-12);
  EXPECT_NEAR(m.heights[0], 4.0, 1e-12);
  EXPECT_NEAR(m.areas[1], 5.0, 1e-12);
}

TEST(BuildSlabs, BadCountRejected) {
  EXPECT_THROW(build_slabs(linear_table(-1, 1, 2), 1.0, 0, 1), GeometryError);
}

TEST(FitLinear, ExactLine) {
  const auto f = fit_linear(on_poly({-3, -2, -1, 0, 1}, 0.0, 3.0, 1.0));
  EXPECT_NEAR(f.chi[0], 3.0, 1e-12);
  EXPECT_NEAR(f.chi[1], 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitLinear, ConstantHasUnitRSquared) {
  const auto f = fit_linear(on_poly({0, 1, 2, 3}, 0.0, 0.0, 4.0));
  EXPECT_NEAR(f.chi[0], 0.0, 1e-12);
  EXPECT_EQ(f.r_squared, 1.0);
}

TEST(FitLinear, DegenerateRejected) {
  EXPECT_THROW(fit_linear({{1.0, 2.0}, {1.0, 3.0}}), GeometryError);
  EXPECT_THROW(fit_quadratic({{1.0, 2.0}, {2.0, 3.0}, {1.0, 4.0}}), GeometryError);
}

TEST(FitQuadratic, ExactParabola) {
  const auto f = fit_quadratic(on_poly({-2, -1, 0, 1, 2, 3}, 2.0, 3.0, 1.0));
  EXPECT_NEAR(f.chi[0], 2.0, 1e-10);
  EXPECT_NEAR(f.chi[1], 3.0, 1e-10);
  EXPECT_NEAR(f.chi[2], 1.0, 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitQuadratic, TrapezoidCutSideIsExact) {
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, kQuarterPi, kQuarterPi);
  const auto s = sample_volumes(trapezoid_table(g, -3.0, 3.0, 13), 1.0, Side::kCut, 13);
  const auto f = fit_quadratic(s);
  EXPECT_NEAR(f.chi[0], 1.0, 1e-8);
  EXPECT_NEAR(f.chi[1], -10.0, 1e-8);
  EXPECT_NEAR(f.chi[2], 0.0, 1e-8);
}

TEST(Fitting, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-4.0, 0.0), v(0.0, 500.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<VolumeSample> s(20);
    for (auto& p : s) p = {u(rng), v(rng)};
    for (int degree : {1, 2}) {
      const auto f = degree == 1 ? fit_linear(s) : fit_quadratic(s);
      const auto x = normal_equations(s, degree);
      for (int c = 0; c <= degree; ++c) {
        EXPECT_NEAR(f.chi[c], x[c], 1e-9 * std::max(1.0, std::abs(x[c])));
      }
    }
  }
}

TEST(SelectVolumeModel, ConvexQuadraticChosen) {
  const auto f = select_volume_model(on_poly({-3, -2, -1, 0}, 1.0, -10.0, 0.0), Side::kCut);
  EXPECT_EQ(f.kind, FitKind::kQuadratic);
  EXPECT_EQ(f.side, Side::kCut);
}

TEST(SelectVolumeModel, ConcaveFallsBackToLinear) {
  const auto f = select_volume_model(on_poly({-3, -2.5, -2, -1.5, -1, -0.5, 0}, -1.0, 0.0, 0.0), Side::kCut);
  EXPECT_EQ(f.kind, FitKind::kLinear);
}

TEST(SelectVolumeModel, TieGoesLinear) {
  const auto f = select_volume_model(on_poly({0, 1, 2, 3}, 0.0, 5.0, 0.0), Side::kFill);
  EXPECT_EQ(f.kind, FitKind::kLinear);
}

TEST(SelectVolumeModel, NeverConcaveOnRandomData) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VolumeSample> s;
    for (int k = 0; k < 10; ++k) s.push_back({-0.3 * k, v(rng)});
    const auto f = select_volume_model(s, Side::kCut);
    if (f.kind == FitKind::kQuadratic) EXPECT_GE(f.chi[0], 0.0);
  }
}

TEST(SampleVolumes, GridAndLength) {
  const auto t = linear_table(-2.0, 4.0, 3.0);
  const auto cut = sample_volumes(t, 10.0, Side::kCut, 5);
  ASSERT_EQ(cut.size(), 5u);
  EXPECT_EQ(cut.front().offset, -2.0);
  EXPECT_EQ(cut.back().offset, 0.0);
  EXPECT_NEAR(cut.front().volume, 60.0, 1e-12);
  const auto fill = sample_volumes(t, 10.0, Side::kFill, 5);
  EXPECT_EQ(fill.front().offset, 0.0);
  EXPECT_NEAR(fill.back().volume, 120.0, 1e-12);
}

TEST(Metrics, HandExamples) {
  EXPECT_EQ(mape({{5.0, 7.0}}, {{5.0, 7.0}}), 0.0);
  EXPECT_NEAR(mape({{100.0}}, {{90.0}}), 10.0, 1e-12);
  EXPECT_NEAR(mape({{100.0, 100.0}, {100.0}}, {{96.0, 104.0}, {92.0}}), 6.0, 1e-12);
  EXPECT_EQ(rmse({{5.0}}, {{5.0}}), 0.0);
  EXPECT_NEAR(rmse({{10.0, 10.0}}, {{7.0, 14.0}}), std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(rmse({{1.0}, {1.0}}, {{2.0}, {4.0}}), 2.0, 1e-12);
}

TEST(Metrics, ZeroActualSkippedAndEmptyRejected) {
  EXPECT_NEAR(mape({{0.0, 100.0}}, {{3.0, 110.0}}), 10.0, 1e-12);
  EXPECT_THROW(mape({}, {}), GeometryError);
  EXPECT_THROW(rmse({}, {}), GeometryError);
  EXPECT_THROW(mape({{1.0}}, {{1.0, 2.0}}), GeometryError);
}

TEST(Metrics, InvariantUnderReordering) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(1.0, 50.0);
  GroupedValues a(6), p(6);
  for (int s = 0; s < 6; ++s) {
    for (int j = 0; j < 5; ++j) {
      a[s].push_back(v(rng));
      p[s].push_back(v(rng));
    }
  }
  const double m0 = mape(a, p), r0 = rmse(a, p);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> order{0, 1, 2, 3, 4, 5};
    std::shuffle(order.begin(), order.end(), rng);
    GroupedValues a2, p2;
    for (int s : order) {
      std::vector<int> inner{0, 1, 2, 3, 4};
      std::shuffle(inner.begin(), inner.end(), rng);
      std::vector<double> x, y;
      for (int j : inner) {
        x.push_back(a[s][j]);
        y.push_back(p[s][j]);
      }
      a2.push_back(x);
      p2.push_back(y);
    }
    EXPECT_NEAR(mape(a2, p2), m0, 1e-12);
    EXPECT_NEAR(rmse(a2, p2), r0, 1e-12);
  }
}

TEST(Metrics, AreaErrorsOfExactPredictorAreZero) {
  const auto g = TrapezoidGeometry::symmetric(8.0, 1.0, 0.9, 0.9);
  CrossSectionSet set;
  set.emplace(SectionKey{0, 0, 0}, trapezoid_table(g, -2.0, 2.0, 7, {0, 0, 0}));
  set.emplace(SectionKey{0, 1, 0}, trapezoid_table(g, -1.0, 3.0, 7, {0, 1, 0}));
  const auto m = area_error_metrics(set, [&](const SectionKey&, Side, double u) { return trapezoid_area(g, u); });
  EXPECT_NEAR(m.mape_cut, 0.0, 1e-12);
  EXPECT_NEAR(m.mape_fill, 0.0, 1e-12);
  EXPECT_NEAR(m.rmse_cut, 0.0, 1e-12);
  const auto off = area_error_metrics(set, [&](const SectionKey&, Side, double u) { return 1.1 * trapezoid_area(g, u); });
  EXPECT_NEAR(off.mape_cut, 10.0, 1e-9);
  EXPECT_NEAR(off.mape_fill, 10.0, 1e-9);
}
