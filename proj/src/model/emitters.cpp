#include <algorithm>
#include <cmath>
#include <string>

#include "vertalign/model.hpp"

namespace vertalign {
namespace {

std::string row_name(const std::string& stem, std::initializer_list<int> parts) {
  std::string name = stem;
  for (int p : parts) name += "_" + std::to_string(p + 1);
  return name;
}

class RowBuilder {
 public:
  RowBuilder(std::string name, ConstraintFamily family) {
    row_.name = std::move(name);
    row_.family = family;
  }

  RowBuilder& add(int var, double coef) {
    if (var < 0 || coef == 0.0) return *this;
    for (auto& t : row_.terms) {
      if (t.first == var) {
        t.second += coef;
        return *this;
      }
    }
    row_.terms.emplace_back(var, coef);
    return *this;
  }

  LinearConstraint done(Relation rel, double rhs) {
    row_.terms.erase(std::remove_if(row_.terms.begin(), row_.terms.end(),
                                    [](const auto& t) { return t.second == 0.0; }),
                     row_.terms.end());
    row_.relation = rel;
    row_.rhs = rhs;
    return std::move(row_);
  }

 private:
  LinearConstraint row_;
};

// Adds P_{i,g}(t) to the row with the given sign.
void add_spline(RowBuilder& row, const VariableCatalog& cat, int i, int g, double t, double sign) {
  row.add(cat.at(VarKind::kSpline, {i, g, 0, 0, 0}), sign);
  row.add(cat.at(VarKind::kSpline, {i, g, 1, 0, 0}), sign * t);
  row.add(cat.at(VarKind::kSpline, {i, g, 2, 0, 0}), sign * t * t);
}

void add_slope(RowBuilder& row, const VariableCatalog& cat, int i, int g, double t, double sign) {
  row.add(cat.at(VarKind::kSpline, {i, g, 1, 0, 0}), sign);
  row.add(cat.at(VarKind::kSpline, {i, g, 2, 0, 0}), sign * 2.0 * t);
}

double local_t(const Road& road, int g, int j) {
  return road.sections[j].station - road.segments[g].start_station;
}

VolumeCaps caps_for(const CapSet& caps, const SectionKey& key) {
  auto it = caps.find(key);
  return it == caps.end() ? VolumeCaps{} : it->second;
}

}  // namespace

SectionKey junction_key(const RoadNetwork& network, int e, int material) {
  const Attachment& a = network.intersections.at(e).attachments.at(0);
  return {a.road, a.section, material};
}

bool is_attached(const NetworkIndex& index, int road, int section) {
  return index.intersection_at(road, section).has_value();
}

VariableCatalog base_catalog(const RoadNetwork& net, const CapSet& caps) {
  VariableCatalog cat;
  const int nm = net.material_count();
  const int nh = net.haul_count();
  const int nr = static_cast<int>(net.roads.size());
  const int ne = static_cast<int>(net.intersections.size());

  for (int i = 0; i < nr; ++i) {
    for (int g = 0; g < net.roads[i].segment_count(); ++g) {
      for (int k = 0; k < 3; ++k) cat.add(VarKind::kSpline, {i, g, k, 0, 0}, -kInf, kInf);
    }
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      const Section& s = net.roads[i].sections[j];
      cat.add(VarKind::kOffset, {i, j, 0, 0, 0}, s.offset_lower, s.offset_upper);
    }
  }
  for (int e = 0; e < ne; ++e) {
    const Intersection& x = net.intersections[e];
    cat.add(VarKind::kJunctionOffset, {e, 0, 0, 0, 0}, x.offset_lower, x.offset_upper);
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < nm; ++m) {
        const VolumeCaps c = caps_for(caps, {i, j, m});
        for (int h = 0; h < nh; ++h) {
          cat.add(VarKind::kCutVolume, {i, j, m, h, 0}, 0.0, c.cut, false, m);
          cat.add(VarKind::kFillVolume, {i, j, m, h, 0}, 0.0, c.fill, false, m);
        }
      }
    }
  }
  for (int e = 0; e < ne; ++e) {
    for (int m = 0; m < nm; ++m) {
      const VolumeCaps c = caps_for(caps, junction_key(net, e, m));
      for (int h = 0; h < nh; ++h) {
        cat.add(VarKind::kJunctionCutVolume, {e, m, h, 0, 0}, 0.0, c.cut, false, m);
        cat.add(VarKind::kJunctionFillVolume, {e, m, h, 0, 0}, 0.0, c.fill, false, m);
      }
    }
  }
  for (int i = 0; i < nr; ++i) {
    const int n = net.roads[i].section_count();
    for (int j = 0; j + 1 < n; ++j) {
      for (int m = 0; m < nm; ++m) {
        for (int h = 0; h < nh; ++h) {
          cat.add(VarKind::kTransitPlus, {i, j, m, h, 0}, 0.0, kInf, false, m);
          cat.add(VarKind::kTransitMinus, {i, j, m, h, 0}, 0.0, kInf, false, m);
        }
      }
    }
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < nm; ++m) {
        const VolumeCaps c = caps_for(caps, {i, j, m});
        for (int h = 0; h < nh; ++h) {
          cat.add(VarKind::kUnloadPlus, {i, j, m, h, 0}, 0.0, c.cut, false, m);
          cat.add(VarKind::kUnloadMinus, {i, j, m, h, 0}, 0.0, c.cut, false, m);
          cat.add(VarKind::kLoadPlus, {i, j, m, h, 0}, 0.0, c.fill, false, m);
          cat.add(VarKind::kLoadMinus, {i, j, m, h, 0}, 0.0, c.fill, false, m);
        }
      }
    }
  }
  for (int p = 0; p < static_cast<int>(net.pits.size()); ++p) {
    const bool borrow = net.pits[p].kind == PitKind::kBorrow;
    for (int m = 0; m < nm; ++m) {
      for (int h = 0; h < nh; ++h) {
        cat.add(borrow ? VarKind::kBorrowPlus : VarKind::kWastePlus, {p, m, h, 0, 0}, 0.0, kInf,
                false, m);
        cat.add(borrow ? VarKind::kBorrowMinus : VarKind::kWasteMinus, {p, m, h, 0, 0}, 0.0, kInf,
                false, m);
      }
    }
  }
  for (int e = 0; e < ne; ++e) {
    const int na = static_cast<int>(net.intersections[e].attachments.size());
    for (int m = 0; m < nm; ++m) {
      const VolumeCaps c = caps_for(caps, junction_key(net, e, m));
      for (int h = 0; h < nh; ++h) {
        for (int k = 0; k < na; ++k) {
          cat.add(VarKind::kJunctionIn, {e, k, m, h, 0}, 0.0, kInf, false, m);
          cat.add(VarKind::kJunctionOut, {e, k, m, h, 0}, 0.0, kInf, false, m);
        }
        cat.add(VarKind::kJunctionUnload, {e, m, h, 0, 0}, 0.0, c.cut, false, m);
        cat.add(VarKind::kJunctionLoad, {e, m, h, 0, 0}, 0.0, c.fill, false, m);
      }
    }
  }
  return cat;
}

std::vector<LinearConstraint> emit_profile_constraints(const RoadNetwork& net,
                                                       const VariableCatalog& cat) {
  std::vector<LinearConstraint> rows;
  NetworkIndex index(net);
  const int nr = static_cast<int>(net.roads.size());
  for (int i = 0; i < nr; ++i) {
    const Road& road = net.roads[i];
    for (int g = 0; g < road.segment_count(); ++g) {
      if (road.segments[g].section_count < 1) {
        throw ModelError(row_name("segment without sections on road", {i}));
      }
    }
    for (int g = 1; g < road.segment_count(); ++g) {
      const double len = road.segments[g - 1].length;
      RowBuilder value(row_name("CONTV", {i, g}), ConstraintFamily::kContinuity);
      add_spline(value, cat, i, g - 1, len, 1.0);
      add_spline(value, cat, i, g, 0.0, -1.0);
      rows.push_back(value.done(Relation::kEqual, 0.0));
      RowBuilder slope(row_name("CONTS", {i, g}), ConstraintFamily::kContinuity);
      add_slope(slope, cat, i, g - 1, len, 1.0);
      add_slope(slope, cat, i, g, 0.0, -1.0);
      rows.push_back(slope.done(Relation::kEqual, 0.0));
    }
  }
  for (int e = 0; e < static_cast<int>(net.intersections.size()); ++e) {
    const auto& atts = net.intersections[e].attachments;
    for (int k = 1; k < static_cast<int>(atts.size()); ++k) {
      RowBuilder row(row_name("ELEV", {e, k - 1}), ConstraintFamily::kIntersectionElevation);
      for (int side = 0; side < 2; ++side) {
        const Attachment& a = atts[k - 1 + side];
        const int g = index.segment_of(a.road, a.section);
        add_spline(row, cat, a.road, g, local_t(net.roads[a.road], g, a.section),
                   side == 0 ? 1.0 : -1.0);
      }
      rows.push_back(row.done(Relation::kEqual, 0.0));
    }
  }
  for (int i = 0; i < nr; ++i) {
    const Road& road = net.roads[i];
    for (int j = 0; j < road.section_count(); ++j) {
      const int g = index.segment_of(i, j);
      RowBuilder row(row_name("GAP", {i, j}), ConstraintFamily::kGap);
      add_spline(row, cat, i, g, local_t(road, g, j), 1.0);
      row.add(cat.at(VarKind::kOffset, {i, j, 0, 0, 0}), -1.0);
      rows.push_back(row.done(Relation::kEqual, road.sections[j].ground_elevation));
    }
  }
  for (int e = 0; e < static_cast<int>(net.intersections.size()); ++e) {
    const auto& atts = net.intersections[e].attachments;
    for (int k = 0; k < static_cast<int>(atts.size()); ++k) {
      RowBuilder row(row_name("OFFE", {e, k}), ConstraintFamily::kIntersectionOffset);
      row.add(cat.at(VarKind::kJunctionOffset, {e, 0, 0, 0, 0}), 1.0);
      row.add(cat.at(VarKind::kOffset, {atts[k].road, atts[k].section, 0, 0, 0}), -1.0);
      rows.push_back(row.done(Relation::kEqual, 0.0));
    }
  }
  const double lo = net.config.grade_lower;
  const double hi = net.config.grade_upper;
  for (int i = 0; i < nr; ++i) {
    const Road& road = net.roads[i];
    for (int g = 0; g < road.segment_count(); ++g) {
      for (int end = 0; end < 2; ++end) {
        const double t = end == 0 ? 0.0 : road.segments[g].length;
        const std::string stem = row_name("GRADE", {i, g}) + (end == 0 ? "_S" : "_E");
        RowBuilder low(stem + "_LO", ConstraintFamily::kGrade);
        add_slope(low, cat, i, g, t, 1.0);
        rows.push_back(low.done(Relation::kGreaterEqual, lo));
        RowBuilder up(stem + "_UP", ConstraintFamily::kGrade);
        add_slope(up, cat, i, g, t, 1.0);
        rows.push_back(up.done(Relation::kLessEqual, hi));
      }
    }
  }
  return rows;
}

std::vector<LinearConstraint> emit_flow_constraints(const RoadNetwork& net,
                                                    const VariableCatalog& cat) {
  std::vector<LinearConstraint> rows;
  NetworkIndex index(net);
  const int nm = net.material_count();
  const int nh = net.haul_count();
  const int nr = static_cast<int>(net.roads.size());
  for (int i = 0; i < nr; ++i) {
    const int n = net.roads[i].section_count();
    for (int j = 0; j < n; ++j) {
      const auto junction = index.intersection_at(i, j);
      const auto attachment = index.attachment_at(i, j);
      const bool at_start = junction && j == 0;
      const bool at_end = junction && j == n - 1;
      const auto& borrows = index.borrow_pits_at(i, j);
      const auto& wastes = index.waste_pits_at(i, j);
      for (int m = 0; m < nm; ++m) {
        for (int h = 0; h < nh; ++h) {
          // Positive node: outflow minus inflow.
          RowBuilder plus(row_name("FLOWP", {i, j, m, h}), ConstraintFamily::kFlow);
          if (j + 1 < n) plus.add(cat.at(VarKind::kTransitPlus, {i, j, m, h, 0}), 1.0);
          if (j > 0) plus.add(cat.at(VarKind::kTransitPlus, {i, j - 1, m, h, 0}), -1.0);
          if (!junction) {
            plus.add(cat.at(VarKind::kLoadPlus, {i, j, m, h, 0}), 1.0);
            plus.add(cat.at(VarKind::kUnloadPlus, {i, j, m, h, 0}), -1.0);
          }
          if (at_start) plus.add(cat.at(VarKind::kJunctionOut, {*junction, *attachment, m, h, 0}), -1.0);
          if (at_end) plus.add(cat.at(VarKind::kJunctionIn, {*junction, *attachment, m, h, 0}), 1.0);
          for (int p : wastes) plus.add(cat.at(VarKind::kWastePlus, {p, m, h, 0, 0}), 1.0);
          for (int p : borrows) plus.add(cat.at(VarKind::kBorrowPlus, {p, m, h, 0, 0}), -1.0);
          rows.push_back(plus.done(Relation::kEqual, 0.0));

          // Negative node carries material toward lower section indices.
          RowBuilder minus(row_name("FLOWM", {i, j, m, h}), ConstraintFamily::kFlow);
          if (j > 0) minus.add(cat.at(VarKind::kTransitMinus, {i, j - 1, m, h, 0}), 1.0);
          if (j + 1 < n) minus.add(cat.at(VarKind::kTransitMinus, {i, j, m, h, 0}), -1.0);
          if (!junction) {
            minus.add(cat.at(VarKind::kLoadMinus, {i, j, m, h, 0}), 1.0);
            minus.add(cat.at(VarKind::kUnloadMinus, {i, j, m, h, 0}), -1.0);
          }
          if (at_start) minus.add(cat.at(VarKind::kJunctionIn, {*junction, *attachment, m, h, 0}), 1.0);
          if (at_end) minus.add(cat.at(VarKind::kJunctionOut, {*junction, *attachment, m, h, 0}), -1.0);
          for (int p : wastes) minus.add(cat.at(VarKind::kWasteMinus, {p, m, h, 0, 0}), 1.0);
          for (int p : borrows) minus.add(cat.at(VarKind::kBorrowMinus, {p, m, h, 0, 0}), -1.0);
          rows.push_back(minus.done(Relation::kEqual, 0.0));
        }
      }
    }
  }
  for (int e = 0; e < static_cast<int>(net.intersections.size()); ++e) {
    const auto& atts = net.intersections[e].attachments;
    const int na = static_cast<int>(atts.size());
    for (int m = 0; m < nm; ++m) {
      for (int h = 0; h < nh; ++h) {
        RowBuilder node(row_name("FLOWE", {e, m, h}), ConstraintFamily::kFlow);
        for (int k = 0; k < na; ++k) {
          node.add(cat.at(VarKind::kJunctionOut, {e, k, m, h, 0}), 1.0);
          node.add(cat.at(VarKind::kJunctionIn, {e, k, m, h, 0}), -1.0);
        }
        node.add(cat.at(VarKind::kJunctionLoad, {e, m, h, 0, 0}), 1.0);
        node.add(cat.at(VarKind::kJunctionUnload, {e, m, h, 0, 0}), -1.0);
        rows.push_back(node.done(Relation::kEqual, 0.0));

        RowBuilder unload(row_name("ZEROU", {e, m, h}), ConstraintFamily::kFlow);
        RowBuilder load(row_name("ZEROL", {e, m, h}), ConstraintFamily::kFlow);
        for (const Attachment& a : atts) {
          unload.add(cat.at(VarKind::kUnloadPlus, {a.road, a.section, m, h, 0}), 1.0);
          unload.add(cat.at(VarKind::kUnloadMinus, {a.road, a.section, m, h, 0}), 1.0);
          load.add(cat.at(VarKind::kLoadPlus, {a.road, a.section, m, h, 0}), 1.0);
          load.add(cat.at(VarKind::kLoadMinus, {a.road, a.section, m, h, 0}), 1.0);
        }
        rows.push_back(unload.done(Relation::kEqual, 0.0));
        rows.push_back(load.done(Relation::kEqual, 0.0));
      }
    }
  }
  return rows;
}

std::vector<LinearConstraint> emit_balance_constraints(const RoadNetwork& net,
                                                       const VariableCatalog& cat) {
  std::vector<LinearConstraint> rows;
  const int nm = net.material_count();
  const int nh = net.haul_count();
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < nm; ++m) {
        RowBuilder cut(row_name("BALU", {i, j, m}), ConstraintFamily::kBalance);
        RowBuilder fill(row_name("BALL", {i, j, m}), ConstraintFamily::kBalance);
        for (int h = 0; h < nh; ++h) {
          cut.add(cat.at(VarKind::kUnloadPlus, {i, j, m, h, 0}), 1.0);
          cut.add(cat.at(VarKind::kUnloadMinus, {i, j, m, h, 0}), 1.0);
          cut.add(cat.at(VarKind::kCutVolume, {i, j, m, h, 0}), -1.0);
          fill.add(cat.at(VarKind::kLoadPlus, {i, j, m, h, 0}), 1.0);
          fill.add(cat.at(VarKind::kLoadMinus, {i, j, m, h, 0}), 1.0);
          fill.add(cat.at(VarKind::kFillVolume, {i, j, m, h, 0}), -1.0);
        }
        rows.push_back(cut.done(Relation::kEqual, 0.0));
        rows.push_back(fill.done(Relation::kEqual, 0.0));
      }
    }
  }
  for (int e = 0; e < static_cast<int>(net.intersections.size()); ++e) {
    for (int m = 0; m < nm; ++m) {
      RowBuilder cut(row_name("BALEU", {e, m}), ConstraintFamily::kBalance);
      RowBuilder fill(row_name("BALEL", {e, m}), ConstraintFamily::kBalance);
      for (int h = 0; h < nh; ++h) {
        cut.add(cat.at(VarKind::kJunctionUnload, {e, m, h, 0, 0}), 1.0);
        cut.add(cat.at(VarKind::kJunctionCutVolume, {e, m, h, 0, 0}), -1.0);
        fill.add(cat.at(VarKind::kJunctionLoad, {e, m, h, 0, 0}), 1.0);
        fill.add(cat.at(VarKind::kJunctionFillVolume, {e, m, h, 0, 0}), -1.0);
      }
      rows.push_back(cut.done(Relation::kEqual, 0.0));
      rows.push_back(fill.done(Relation::kEqual, 0.0));
    }
  }
  return rows;
}

std::vector<LinearConstraint> emit_capacity_constraints(const RoadNetwork& net,
                                                        const VariableCatalog& cat) {
  std::vector<LinearConstraint> rows;
  if (!net.config.pit_capacity_constraints) return rows;
  for (int p = 0; p < static_cast<int>(net.pits.size()); ++p) {
    const Pit& pit = net.pits[p];
    const bool borrow = pit.kind == PitKind::kBorrow;
    for (int m = 0; m < net.material_count(); ++m) {
      RowBuilder row(row_name(borrow ? "CAPB" : "CAPW", {p, m}), ConstraintFamily::kCapacity);
      for (int h = 0; h < net.haul_count(); ++h) {
        row.add(cat.at(borrow ? VarKind::kBorrowPlus : VarKind::kWastePlus, {p, m, h, 0, 0}), 1.0);
        row.add(cat.at(borrow ? VarKind::kBorrowMinus : VarKind::kWasteMinus, {p, m, h, 0, 0}), 1.0);
      }
      rows.push_back(row.done(Relation::kLessEqual, pit.capacity.at(m)));
    }
  }
  return rows;
}

std::vector<double> assemble_objective(const RoadNetwork& net, const VariableCatalog& cat) {
  std::vector<double> c(cat.size(), 0.0);
  const double transfer = net.config.intersection_transfer_distance;
  for (int k = 0; k < cat.size(); ++k) {
    const Variable& v = cat[k];
    const auto& idx = v.index;
    auto haul = [&](int h, int m) { return net.haul_types[h].haul_cost[m]; };
    auto load = [&](int h, int m) { return net.haul_types[h].loading_cost[m]; };
    switch (v.kind) {
      case VarKind::kCutVolume:
        c[k] = net.materials[idx[2]].excavation_cost + load(idx[3], idx[2]);
        break;
      case VarKind::kFillVolume:
        c[k] = net.materials[idx[2]].embankment_cost;
        break;
      case VarKind::kJunctionCutVolume:
        c[k] = net.materials[idx[1]].excavation_cost + load(idx[2], idx[1]);
        break;
      case VarKind::kJunctionFillVolume:
        c[k] = net.materials[idx[1]].embankment_cost;
        break;
      case VarKind::kTransitPlus:
      case VarKind::kTransitMinus: {
        const Road& road = net.roads[idx[0]];
        const double d = road.sections[idx[1] + 1].station - road.sections[idx[1]].station;
        c[k] = haul(idx[3], idx[2]) * d;
        break;
      }
      case VarKind::kJunctionIn:
      case VarKind::kJunctionOut:
        c[k] = haul(idx[3], idx[2]) * transfer;
        break;
      case VarKind::kBorrowPlus:
      case VarKind::kBorrowMinus:
        c[k] = net.materials[idx[1]].excavation_cost + load(idx[2], idx[1]) +
               haul(idx[2], idx[1]) * net.pits[idx[0]].dead_haul_distance;
        break;
      case VarKind::kWastePlus:
      case VarKind::kWasteMinus:
        c[k] = net.materials[idx[1]].embankment_cost +
               haul(idx[2], idx[1]) * net.pits[idx[0]].dead_haul_distance;
        break;
      default:
        break;
    }
  }
  return c;
}

}  // namespace vertalign
