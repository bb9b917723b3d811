#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "vertalign/model.hpp"
#include "vertalign/solver.hpp"

using namespace vertalign;

namespace {

CrossSectionTable rect_table(double lower, double upper, double width, SectionKey key) {
  CrossSectionTable t;
  t.key = key;
  for (double u : {lower, lower / 2, 0.0, upper / 2, upper}) {
    t.samples.push_back({u, u < 0 ? -width * u : 0.0, u > 0 ? width * u : 0.0});
  }
  return t;
}

CrossSectionSet rect_tables(const RoadNetwork& net, double width) {
  CrossSectionSet out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      const Section& s = net.roads[i].sections[j];
      for (int m = 0; m < net.material_count(); ++m) {
        out.emplace(SectionKey{i, j, m}, rect_table(s.offset_lower, s.offset_upper, width, {i, j, m}));
      }
    }
  }
  return out;
}

int count_family(const std::vector<LinearConstraint>& rows, ConstraintFamily f) {
  int n = 0;
  for (const auto& r : rows) n += r.family == f;
  return n;
}

RoadNetwork three_way() {
  RoadNetwork net;
  for (int i = 0; i < 3; ++i) net.roads.push_back(fixtures::make_road(i + 1, {2}, 60.0, {100, 100}));
  Intersection e;
  e.id = 1;
  e.attachments = {{0, 1}, {1, 0}, {2, 0}};
  e.offset_lower = -3.0;
  e.offset_upper = 3.0;
  net.intersections.push_back(e);
  net.materials = {fixtures::material(1), fixtures::material(2)};
  net.haul_types.push_back(fixtures::haul(1, 2));
  net.config.haul_count = 1;
  return net;
}

ModelInstance uva(const RoadNetwork& net, int slabs) {
  const auto tables = fixtures::trapezoid_tables(net);
  return build_uva(net, make_slabs(net, tables, slabs, slabs), volume_caps(net, tables));
}

ModelInstance cuva(const RoadNetwork& net, FitMode mode = FitMode::kAuto) {
  const auto tables = fixtures::trapezoid_tables(net);
  return build_cuva(net, fit_volume_models(net, tables, mode), volume_caps(net, tables));
}

void fix(ModelInstance& inst, int var, double value) {
  inst.catalog[var].lower = value;
  inst.catalog[var].upper = value;
}

}  // namespace

TEST(ProfileConstraints, OneKnotGivesTwoContinuityRows) {
  const auto net = fixtures::single_road({2, 2}, {100, 100, 100, 100});
  const auto cat = base_catalog(net, {});
  const auto rows = emit_profile_constraints(net, cat);
  EXPECT_EQ(count_family(rows, ConstraintFamily::kContinuity), 2);
  EXPECT_EQ(count_family(rows, ConstraintFamily::kGap), 4);
}

TEST(ProfileConstraints, OneSegmentThreeSections) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  const auto rows = emit_profile_constraints(net, base_catalog(net, {}));
  EXPECT_EQ(count_family(rows, ConstraintFamily::kGap), 3);
  EXPECT_EQ(count_family(rows, ConstraintFamily::kContinuity), 0);
  // two endpoints, each bounded on both sides
  std::set<std::string> endpoints;
  for (const auto& r : rows) {
    if (r.family == ConstraintFamily::kGrade) endpoints.insert(r.name.substr(0, r.name.rfind('_')));
  }
  EXPECT_EQ(endpoints.size(), 2u);
  EXPECT_EQ(count_family(rows, ConstraintFamily::kGrade), 4);
}

TEST(ProfileConstraints, ThreeRoadIntersection) {
  const auto net = three_way();
  ASSERT_TRUE(validate_network(net).ok()) << validate_network(net).summary();
  const auto rows = emit_profile_constraints(net, base_catalog(net, {}));
  EXPECT_EQ(count_family(rows, ConstraintFamily::kIntersectionElevation), 2);
  EXPECT_EQ(count_family(rows, ConstraintFamily::kIntersectionOffset), 3);
}

TEST(FlowConstraints, TransitBalancePerSectionAndDirection) {
  for (int n : {1, 3, 5}) {
    const auto net = fixtures::single_road({n}, std::vector<double>(n, 100.0));
    const auto rows = emit_flow_constraints(net, base_catalog(net, {}));
    EXPECT_EQ(static_cast<int>(rows.size()), 2 * n);
    for (const auto& r : rows) EXPECT_EQ(r.name.substr(0, 4), "FLOW");
  }
}

TEST(FlowConstraints, ZeroFlowsSatisfyEverything) {
  const auto net = three_way();
  const auto cat = base_catalog(net, {});
  const std::vector<double> zero(cat.size(), 0.0);
  for (const auto& r : emit_flow_constraints(net, cat)) EXPECT_EQ(r.violation(zero), 0.0) << r.name;
  for (const auto& r : emit_balance_constraints(net, cat)) EXPECT_EQ(r.violation(zero), 0.0) << r.name;
}

TEST(BalanceConstraints, Counts) {
  auto net = fixtures::single_road({2}, {100, 100});
  net.haul_types = {fixtures::haul(1, 1), fixtures::haul(2, 1), fixtures::haul(3, 1)};
  net.config.haul_count = 3;
  EXPECT_EQ(emit_balance_constraints(net, base_catalog(net, {})).size(), 4u);

  const auto j = three_way();
  int junction_rows = 0;
  for (const auto& r : emit_balance_constraints(j, base_catalog(j, {}))) junction_rows += r.name.find("BALE") == 0;
  EXPECT_EQ(junction_rows, 4);
}

TEST(VolumeMilp, SingleSlabNeedsNoBinaries) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  const auto inst = uva(net, 1);
  EXPECT_EQ(inst.integer_count(), 0);
}

TEST(VolumeMilp, ThreeSlabsGiveTwelveBinaries) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  const auto inst = uva(net, 3);
  EXPECT_EQ(inst.integer_count(), 12);
  EXPECT_TRUE(inst.quadratic.empty());
}

TEST(VolumeMilp, TwoSlabPiecewiseMinimum) {
  // W = 10, 45 degree walls on [-2, 0]: slab areas 11 and 13 per meter of depth
  auto net = fixtures::single_road({1}, {100.0}, 1.0);
  net.roads[0].sections[0].offset_lower = -2.0;
  net.roads[0].sections[0].offset_upper = 2.0;
  net.pits.push_back({PitKind::kWaste, 0, 0, {1e6}, 0.0});
  net.materials[0] = fixtures::material(1, 1.0, 0.0);
  net.haul_types[0] = fixtures::haul(1, 1, 0.0, 0.0);
  net.config.grade_lower = -1.0;
  net.config.grade_upper = 1.0;
  CrossSectionSet tables;
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, 0.785398163397448, 0.785398163397448);
  tables.emplace(SectionKey{0, 0, 0}, trapezoid_table(g, -2.0, 2.0, 3));
  const auto slabs = make_slabs(net, tables, 2, 2);
  EXPECT_NEAR(slabs.at({0, 0, 0}).cut.areas[0], 11.0, 1e-9);
  auto inst = build_uva(net, slabs, volume_caps(net, tables));
  fix(inst, inst.catalog.at(VarKind::kOffset, {0, 0}), -1.5);
  const auto sol = solve_instance(inst);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.values[inst.catalog.at(VarKind::kCutVolume, {0, 0, 0, 0})], 17.5, 1e-6);
  EXPECT_NEAR(sol.objective, 17.5, 1e-6);
}

TEST(VolumeMilp, LpRelaxationMatchesOnSingleMaterial) {
  const auto net = fixtures::single_road({3}, {100.0, 103.0, 99.0});
  const auto inst = uva(net, 4);
  auto relaxed = inst;
  for (int k = 0; k < relaxed.catalog.size(); ++k) relaxed.catalog[k].integer = false;
  const auto a = solve_instance(inst);
  const auto b = solve_lp(relaxed);
  ASSERT_EQ(a.status, SolveStatus::kOptimal);
  ASSERT_EQ(b.status, SolveStatus::kOptimal);
  EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::max(1.0, a.objective));
}

TEST(VolumeFitted, RectangleStaysLinear) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  const auto tables = rect_tables(net, 10.0);
  const auto fits = fit_volume_models(net, tables, FitMode::kAuto);
  for (const auto& [k, f] : fits) {
    EXPECT_EQ(f.cut.kind, FitKind::kLinear);
    EXPECT_NEAR(f.cut.chi[0], -10.0 * net.roads[0].sections[k.section].length, 1e-8);
  }
  const auto inst = build_cuva(net, fits, volume_caps(net, tables));
  EXPECT_TRUE(inst.quadratic.empty());
  EXPECT_EQ(inst.integer_count(), 0);
}

TEST(VolumeFitted, TrapezoidGivesQuadraticRows) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  const auto inst = cuva(net, FitMode::kAuto);
  EXPECT_EQ(inst.quadratic.size(), 6u);
  for (const auto& q : inst.quadratic) EXPECT_GE(q.chi1, 0.0);
  const auto lin = cuva(net, FitMode::kLinear);
  EXPECT_TRUE(lin.quadratic.empty());
}

TEST(VolumeFitted, UnitTrapezoidCoefficients) {
  auto net = fixtures::single_road({1}, {100.0}, 1.0);
  net.roads[0].sections[0].offset_lower = -3.0;
  CrossSectionSet tables;
  const auto g = TrapezoidGeometry::symmetric(10.0, 1.0, 0.785398163397448, 0.785398163397448);
  tables.emplace(SectionKey{0, 0, 0}, trapezoid_table(g, -3.0, 3.0, 13));
  const auto fits = fit_volume_models(net, tables, FitMode::kQuadratic, 13);
  const auto q = fits.at({0, 0, 0}).cut.quadratic_form();
  EXPECT_NEAR(q[0], 1.0, 1e-8);
  EXPECT_NEAR(q[1], -10.0, 1e-8);
  EXPECT_NEAR(q[2], 0.0, 1e-8);
}

TEST(VolumeFitted, MissingOrConcaveFitRejected) {
  const auto net = fixtures::single_road({2}, {100, 101});
  const auto tables = fixtures::trapezoid_tables(net);
  auto fits = fit_volume_models(net, tables, FitMode::kAuto);
  auto cat = base_catalog(net, volume_caps(net, tables));
  auto missing = fits;
  missing.erase(missing.begin());
  EXPECT_THROW(emit_volume_fitted(net, missing, cat), ModelError);
  auto concave = fits;
  concave.begin()->second.cut.kind = FitKind::kQuadratic;
  concave.begin()->second.cut.chi = {-1.0, 0.0, 0.0};
  EXPECT_THROW(emit_volume_fitted(net, concave, cat), ModelError);
}

TEST(VolumeFitted, FitsAreNonPositiveOnOppositeSide) {
  const auto net = fixtures::single_road({3}, {100, 101, 102});
  for (FitMode mode : {FitMode::kLinear, FitMode::kQuadratic, FitMode::kAuto}) {
    const auto fits = fit_volume_models(net, fixtures::trapezoid_tables(net, 0.6), mode);
    for (const auto& [k, f] : fits) {
      const Section& s = net.roads[0].sections[k.section];
      for (int t = 0; t <= 20; ++t) {
        EXPECT_LE(f.cut.evaluate(s.offset_upper * t / 20.0), 1e-9);
        EXPECT_LE(f.fill.evaluate(s.offset_lower * t / 20.0), 1e-9);
      }
    }
  }
}

TEST(Objective, ZeroCostsGiveZeroVector) {
  auto net = three_way();
  for (auto& m : net.materials) m = {m.id, 0.0, 0.0};
  net.haul_types[0] = fixtures::haul(1, 2, 0.0, 0.0);
  for (double c : assemble_objective(net, base_catalog(net, {}))) EXPECT_EQ(c, 0.0);
}

TEST(Objective, AdjacentCutAndFillHandPriced) {
  // sections 10 m apart, cut 1 m then fill 1 m on a rectangular 10 m section
  auto net = fixtures::single_road({2}, {100.0, 98.0}, 20.0);
  net.materials[0] = fixtures::material(1, 2.0, 0.0);
  net.haul_types[0] = fixtures::haul(1, 1, 0.01, 0.5);
  const auto tables = rect_tables(net, 10.0);
  const auto caps = volume_caps(net, tables);
  for (int variant = 0; variant < 2; ++variant) {
    auto inst = variant == 0 ? build_uva(net, make_slabs(net, tables, 3, 3), caps)
                             : build_cuva(net, fit_volume_models(net, tables, FitMode::kAuto), caps);
    fix(inst, inst.catalog.at(VarKind::kOffset, {0, 0}), -1.0);
    fix(inst, inst.catalog.at(VarKind::kOffset, {0, 1}), 1.0);
    const auto sol = solve_instance(inst);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    const double v = 10.0 * 10.0;
    EXPECT_NEAR(sol.objective, v * (2.0 + 0.5 + 0.01 * 10.0), 1e-6);
  }
}

TEST(Objective, DoublingCostsDoublesOptimum) {
  const auto base = fixtures::single_road({2, 2}, {100.0, 102.5, 99.0, 101.0});
  auto doubled = base;
  for (auto& m : doubled.materials) m = {m.id, 2 * m.excavation_cost, 2 * m.embankment_cost};
  for (auto& h : doubled.haul_types) {
    for (auto& c : h.haul_cost) c *= 2;
    for (auto& y : h.loading_cost) y *= 2;
  }
  const auto a = solve_instance(uva(base, 3));
  const auto b = solve_instance(uva(doubled, 3));
  ASSERT_EQ(a.status, SolveStatus::kOptimal);
  ASSERT_EQ(b.status, SolveStatus::kOptimal);
  EXPECT_GT(a.objective, 0.0);
  EXPECT_NEAR(b.objective, 2 * a.objective, 1e-6 * b.objective);
}

TEST(Objective, RaisingACostNeverLowersOptimum) {
  const auto base = fixtures::single_road({2, 2}, {100.0, 102.5, 99.0, 101.0});
  const double ref = solve_instance(cuva(base)).objective;
  auto net = base;
  net.materials[0].embankment_cost += 0.7;
  EXPECT_GE(solve_instance(cuva(net)).objective, ref - 1e-6);
  net = base;
  net.haul_types[0].haul_cost[0] *= 3.0;
  EXPECT_GE(solve_instance(cuva(net)).objective, ref - 1e-6);
}

TEST(BuildUva, FlatGroundOptimumIsZero) {
  const auto net = fixtures::single_road({3}, {100, 100, 100});
  for (const auto& inst : {uva(net, 3), cuva(net)}) {
    const auto sol = solve_instance(inst);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_NEAR(sol.objective, 0.0, 1e-9);
  }
}

TEST(BuildModels, SharedBlocksAreIdentical) {
  const auto net = three_way();
  const auto a = uva(net, 3);
  const auto b = cuva(net);
  std::vector<const LinearConstraint*> ra, rb;
  for (const auto& r : a.linear) {
    if (r.family != ConstraintFamily::kVolumeSlab) ra.push_back(&r);
  }
  for (const auto& r : b.linear) {
    if (r.family != ConstraintFamily::kVolumeFitted) rb.push_back(&r);
  }
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k]->name, rb[k]->name);
    EXPECT_EQ(ra[k]->terms, rb[k]->terms);
    EXPECT_EQ(ra[k]->rhs, rb[k]->rhs);
    EXPECT_EQ(ra[k]->relation, rb[k]->relation);
  }
  for (int k = 0; k < b.catalog.size(); ++k) {
    EXPECT_EQ(a.catalog[k].name, b.catalog[k].name);
    EXPECT_EQ(a.objective[k], b.objective[k]);
  }
}

TEST(BuildModels, FamilyCoverage) {
  auto net = three_way();
  net.pits.push_back({PitKind::kBorrow, 0, 0, {50.0, 50.0}, 30.0});
  std::set<std::string> expect{"continuity", "intersection-elevation", "gap", "intersection-offset", "grade",
                               "flow", "balance", "capacity"};
  auto fams = [](const ModelInstance& inst) {
    std::set<std::string> out;
    for (const auto& [f, n] : inst.family_counts()) {
      if (n > 0) out.insert(family_name(f));
    }
    return out;
  };
  net.roads[0] = fixtures::make_road(1, {1, 1}, 30.0, {100, 100});
  auto e1 = expect;
  e1.insert("volume-slab");
  EXPECT_EQ(fams(uva(net, 2)), e1);
  auto e2 = expect;
  e2.insert("volume-fitted");
  EXPECT_EQ(fams(cuva(net)), e2);
}

TEST(BuildModels, NoZeroCoefficientsAndDenseCatalog) {
  const auto inst = uva(three_way(), 3);
  for (const auto& r : inst.linear) {
    for (const auto& [v, c] : r.terms) {
      EXPECT_NE(c, 0.0) << r.name;
      EXPECT_GE(v, 0);
      EXPECT_LT(v, inst.catalog.size());
    }
  }
  for (int k = 0; k < inst.catalog.size(); ++k) {
    const auto& var = inst.catalog[k];
    EXPECT_EQ(inst.catalog.index_of(var.name), k);
    EXPECT_EQ(inst.catalog.at(var.kind, var.index), k);
    EXPECT_EQ(variable_name(var.kind, var.index), var.name);
  }
}

TEST(ValidateSolution, GapOffByOne) {
  const auto net = fixtures::single_road({3}, {100, 100, 100});
  const auto inst = uva(net, 2);
  std::vector<double> x(inst.catalog.size(), 0.0);
  x[inst.catalog.at(VarKind::kSpline, {0, 0, 0})] = 100.0;
  const auto ok = validate_solution(inst, x);
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.max_residual(), 0.0);
  x[inst.catalog.at(VarKind::kOffset, {0, 1})] = 1.0;
  const auto bad = validate_solution(inst, x);
  EXPECT_FALSE(bad.ok());
  EXPECT_NEAR(bad.family_max.at("gap"), 1.0, 1e-12);
}

TEST(ValidateSolution, DimensionMismatch) {
  const auto inst = cuva(fixtures::single_road({2}, {100, 100}));
  EXPECT_THROW(validate_solution(inst, {1.0, 2.0}), ModelError);
}

TEST(ValidateSolution, SolvedInstancesConserveMaterial) {
  auto net = three_way();
  net.roads[1].sections[1].ground_elevation = 103.0;
  net.roads[2].sections[1].ground_elevation = 97.5;
  net.pits.push_back({PitKind::kWaste, 1, 1, {400.0, 400.0}, 30.0});
  for (const auto& inst : {uva(net, 3), cuva(net)}) {
    const auto sol = solve_instance(inst);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    const auto rep = validate_solution(inst, sol.values);
    EXPECT_TRUE(rep.ok()) << (rep.violations.empty() ? "" : rep.violations.front());
    EXPECT_LE(rep.max_conservation(), 1e-8);
  }
}

TEST(Caps, DefaultIsTenPercentAboveExtremeVolume) {
  const auto net = fixtures::single_road({1}, {100.0}, 10.0);
  const auto tables = rect_tables(net, 4.0);
  const auto caps = volume_caps(net, tables);
  EXPECT_NEAR(caps.at({0, 0, 0}).cut, 1.1 * 4.0 * 3.0 * 10.0, 1e-9);
  auto custom = net;
  custom.config.cut_volume_cap = 7.0;
  EXPECT_EQ(volume_caps(custom, tables).at({0, 0, 0}).cut, 7.0);
}

TEST(CheckTables, MissingTableRejected) {
  const auto net = fixtures::single_road({2}, {100, 100});
  auto tables = fixtures::trapezoid_tables(net);
  tables.erase(tables.begin());
  EXPECT_THROW(check_tables(net, tables), ModelError);
}
