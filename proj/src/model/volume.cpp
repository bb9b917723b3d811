#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "vertalign/model.hpp"

namespace vertalign {
namespace {

constexpr double kCoverTol = 1e-9;

std::string key_text(const SectionKey& k) {
  return std::to_string(k.road + 1) + "_" + std::to_string(k.section + 1) + "_" +
         std::to_string(k.material + 1);
}

const CrossSectionTable& table_for(const CrossSectionSet& tables, const SectionKey& key) {
  auto it = tables.find(key);
  if (it == tables.end()) throw ModelError("missing cross-section table " + key_text(key));
  return it->second;
}

double section_length(const RoadNetwork& net, const SectionKey& key) {
  return net.roads.at(key.road).sections.at(key.section).length;
}

// A convex bound is non-positive on [0, far] iff it is at both ends; far is
// the extreme offset on the opposite side of the ground line.
bool opposite_side_safe(const FittedVolumeModel& fit, double far) {
  const double g_far = fit.evaluate(far);
  const double g_zero = fit.evaluate(0.0);
  return g_zero <= 0.0 && g_far <= 0.0;
}

void clamp_constant(FittedVolumeModel& fit) {
  double& c = fit.kind == FitKind::kLinear ? fit.chi[1] : fit.chi[2];
  c = std::min(c, 0.0);
}

FittedVolumeModel make_safe(FittedVolumeModel fit, const FittedVolumeModel& linear_fallback,
                            double far) {
  clamp_constant(fit);
  if (fit.kind == FitKind::kQuadratic && (fit.chi[0] < 0.0 || !opposite_side_safe(fit, far))) {
    fit = linear_fallback;
    clamp_constant(fit);
  }
  if (fit.kind == FitKind::kLinear && !opposite_side_safe(fit, far)) {
    fit.chi[0] = 0.0;
  }
  return fit;
}

}  // namespace

void check_tables(const RoadNetwork& net, const CrossSectionSet& tables) {
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      const Section& s = net.roads[i].sections[j];
      for (int m = 0; m < net.material_count(); ++m) {
        const CrossSectionTable& t = table_for(tables, {i, j, m});
        if (t.samples.empty() || t.min_offset() > s.offset_lower + kCoverTol ||
            t.max_offset() < s.offset_upper - kCoverTol) {
          throw ModelError("cross-section table " + key_text({i, j, m}) +
                           " does not cover the section offset bounds");
        }
      }
    }
  }
}

SlabSet make_slabs(const RoadNetwork& net, const CrossSectionSet& tables, int cut_slabs,
                   int fill_slabs) {
  check_tables(net, tables);
  SlabSet out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < net.material_count(); ++m) {
        const SectionKey key{i, j, m};
        out[key] = build_slabs(table_for(tables, key), section_length(net, key), cut_slabs,
                               fill_slabs);
      }
    }
  }
  return out;
}

FitSet fit_volume_models(const RoadNetwork& net, const CrossSectionSet& tables, FitMode mode,
                         int samples_per_side) {
  check_tables(net, tables);
  FitSet out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < net.material_count(); ++m) {
        const SectionKey key{i, j, m};
        const CrossSectionTable& table = table_for(tables, key);
        const double len = section_length(net, key);
        SideFits fits;
        for (Side side : {Side::kCut, Side::kFill}) {
          const auto samples = sample_volumes(table, len, side, samples_per_side);
          FittedVolumeModel linear = fit_linear(samples);
          linear.side = side;
          FittedVolumeModel chosen;
          switch (mode) {
            case FitMode::kLinear: chosen = linear; break;
            case FitMode::kQuadratic:
              chosen = fit_quadratic(samples);
              chosen.side = side;
              break;
            case FitMode::kAuto: chosen = select_volume_model(samples, side); break;
          }
          const double far = side == Side::kCut ? table.max_offset() : table.min_offset();
          FittedVolumeModel safe = make_safe(chosen, linear, far);
          if (safe.kind != chosen.kind) {
            spdlog::debug("fit {} {}: quadratic replaced by linear to keep the bound convex and "
                          "inactive on the opposite side",
                          key_text(key), side_name(side));
          }
          (side == Side::kCut ? fits.cut : fits.fill) = safe;
        }
        out[key] = fits;
      }
    }
  }
  return out;
}

CapSet volume_caps(const RoadNetwork& net, const CrossSectionSet& tables) {
  CapSet out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      for (int m = 0; m < net.material_count(); ++m) {
        const SectionKey key{i, j, m};
        const CrossSectionTable& t = table_for(tables, key);
        const double len = section_length(net, key);
        VolumeCaps caps;
        caps.cut = std::max(1.1 * len * t.area(Side::kCut, t.min_offset()), 1.0);
        caps.fill = std::max(1.1 * len * t.area(Side::kFill, t.max_offset()), 1.0);
        if (net.config.cut_volume_cap) caps.cut = *net.config.cut_volume_cap;
        if (net.config.fill_volume_cap) caps.fill = *net.config.fill_volume_cap;
        out[key] = caps;
      }
    }
  }
  return out;
}

namespace {

struct VolumeOwner {
  std::string suffix;  // "_i_j_m" or "_e_m"
  bool junction = false;
  int offset_var = -1;
  std::vector<int> cut_vars;
  std::vector<int> fill_vars;
  SectionKey key;
  VarIndex depth_base;  // slab index left for side and slab number
};

std::vector<VolumeOwner> volume_owners(const RoadNetwork& net, const VariableCatalog& cat) {
  std::vector<VolumeOwner> owners;
  NetworkIndex index(net);
  const int nm = net.material_count();
  const int nh = net.haul_count();
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    for (int j = 0; j < net.roads[i].section_count(); ++j) {
      if (is_attached(index, i, j)) continue;
      for (int m = 0; m < nm; ++m) {
        VolumeOwner o;
        o.suffix = "_" + key_text({i, j, m});
        o.offset_var = cat.at(VarKind::kOffset, {i, j, 0, 0, 0});
        for (int h = 0; h < nh; ++h) {
          o.cut_vars.push_back(cat.at(VarKind::kCutVolume, {i, j, m, h, 0}));
          o.fill_vars.push_back(cat.at(VarKind::kFillVolume, {i, j, m, h, 0}));
        }
        o.key = {i, j, m};
        o.depth_base = {i, j, m, 0, 0};
        owners.push_back(std::move(o));
      }
    }
  }
  for (int e = 0; e < static_cast<int>(net.intersections.size()); ++e) {
    for (int m = 0; m < nm; ++m) {
      VolumeOwner o;
      o.junction = true;
      o.suffix = "_" + std::to_string(e + 1) + "_" + std::to_string(m + 1);
      o.offset_var = cat.at(VarKind::kJunctionOffset, {e, 0, 0, 0, 0});
      for (int h = 0; h < nh; ++h) {
        o.cut_vars.push_back(cat.at(VarKind::kJunctionCutVolume, {e, m, h, 0, 0}));
        o.fill_vars.push_back(cat.at(VarKind::kJunctionFillVolume, {e, m, h, 0, 0}));
      }
      o.key = junction_key(net, e, m);
      o.depth_base = {e, m, 0, 0, 0};
      owners.push_back(std::move(o));
    }
  }
  return owners;
}

}  // namespace

SlabVolumeBlock emit_volume_milp(const RoadNetwork& net, const SlabSet& slabs,
                                 VariableCatalog& cat) {
  SlabVolumeBlock out;
  for (const VolumeOwner& o : volume_owners(net, cat)) {
    auto it = slabs.find(o.key);
    if (it == slabs.end()) throw ModelError("missing slabs for " + key_text(o.key));
    for (Side side : {Side::kCut, Side::kFill}) {
      const SlabSide& s = it->second.side(side);
      const int sd = side == Side::kCut ? 0 : 1;
      const std::string tag = side == Side::kCut ? "CUT" : "FILL";
      const std::string owner_tag = (o.junction ? "E" : "") + tag + o.suffix;
      const double u_sign = side == Side::kCut ? 1.0 : -1.0;
      const auto& vol_vars = side == Side::kCut ? o.cut_vars : o.fill_vars;
      const int k_count = s.count();
      if (k_count < 1) throw ModelError("empty slab side for " + key_text(o.key));
      for (int k = 0; k < k_count; ++k) {
        if (!(s.heights[k] > 0.0) || s.areas[k] < 0.0 || (k > 0 && !(s.areas[k] > s.areas[k - 1]))) {
          throw ModelError("slab areas must be strictly increasing for " + key_text(o.key));
        }
      }

      LinearConstraint vol;
      vol.name = "VOL" + owner_tag;
      vol.family = ConstraintFamily::kVolumeSlab;
      vol.relation = Relation::kGreaterEqual;
      vol.rhs = 0.0;
      for (int v : vol_vars) vol.terms.emplace_back(v, 1.0);

      if (k_count == 1) {
        // V >= -A u for cut, V >= A u for fill.
        if (s.areas[0] != 0.0) vol.terms.emplace_back(o.offset_var, u_sign * s.areas[0]);
        out.rows.push_back(std::move(vol));
        continue;
      }

      const VarKind depth_kind = o.junction ? VarKind::kJunctionSlabDepth : VarKind::kSlabDepth;
      const VarKind select_kind = o.junction ? VarKind::kJunctionSlabSelect : VarKind::kSlabSelect;
      auto slab_index = [&](int k) {
        VarIndex idx = o.depth_base;
        if (o.junction) {
          idx[2] = sd;
          idx[3] = k;
        } else {
          idx[3] = sd;
          idx[4] = k;
        }
        return idx;
      };
      IncrementalBlock block;
      for (int k = 0; k < k_count; ++k) {
        block.depth_vars.push_back(
            cat.add(depth_kind, slab_index(k), 0.0, s.heights[k], false, o.key.material));
        block.heights.push_back(s.heights[k]);
      }
      for (int k = 0; k + 1 < k_count; ++k) {
        block.select_vars.push_back(cat.add(select_kind, slab_index(k), 0.0, 1.0, true));
      }

      LinearConstraint link;
      link.name = "LINK" + owner_tag;
      link.family = ConstraintFamily::kVolumeSlab;
      link.relation = Relation::kGreaterEqual;
      link.rhs = 0.0;
      for (int d : block.depth_vars) link.terms.emplace_back(d, 1.0);
      link.terms.emplace_back(o.offset_var, u_sign);
      out.rows.push_back(std::move(link));

      for (int k = 0; k < k_count; ++k) {
        if (s.areas[k] != 0.0) vol.terms.emplace_back(block.depth_vars[k], -s.areas[k]);
      }
      out.rows.push_back(std::move(vol));

      for (int k = 0; k + 1 < k_count; ++k) {
        const std::string n = std::to_string(k + 1);
        LinearConstraint full;
        full.name = "ORDA_" + owner_tag + "_" + n;
        full.family = ConstraintFamily::kVolumeSlab;
        full.relation = Relation::kGreaterEqual;
        full.terms = {{block.depth_vars[k], 1.0}, {block.select_vars[k], -s.heights[k]}};
        out.rows.push_back(std::move(full));
        LinearConstraint open;
        open.name = "ORDB_" + owner_tag + "_" + n;
        open.family = ConstraintFamily::kVolumeSlab;
        open.relation = Relation::kLessEqual;
        open.terms = {{block.depth_vars[k + 1], 1.0}, {block.select_vars[k], -s.heights[k + 1]}};
        out.rows.push_back(std::move(open));
      }
      out.blocks.push_back(std::move(block));
    }
  }
  return out;
}

FittedVolumeBlock emit_volume_fitted(const RoadNetwork& net, const FitSet& fits,
                                     const VariableCatalog& cat) {
  FittedVolumeBlock out;
  for (const VolumeOwner& o : volume_owners(net, cat)) {
    auto it = fits.find(o.key);
    if (it == fits.end()) throw ModelError("missing volume fit for " + key_text(o.key));
    for (Side side : {Side::kCut, Side::kFill}) {
      FittedVolumeModel fit = side == Side::kCut ? it->second.cut : it->second.fill;
      const std::string side_tag = side == Side::kCut ? "_CUT" : "_FILL";
      const auto& vol_vars = side == Side::kCut ? o.cut_vars : o.fill_vars;
      if (fit.kind == FitKind::kQuadratic && fit.chi[0] < 0.0) {
        throw ModelError("non-convex quadratic volume fit for " + key_text(o.key));
      }
      clamp_constant(fit);
      const Variable& u = cat[o.offset_var];
      const double far = side == Side::kCut ? u.upper : u.lower;
      if (!opposite_side_safe(fit, far)) {
        throw ModelError("volume fit for " + key_text(o.key) +
                         " is positive on the opposite side of the ground line");
      }
      const std::string stem = o.junction ? "E_" : "_";
      if (fit.kind == FitKind::kLinear) {
        LinearConstraint row;
        row.name = "VOLL" + stem + o.suffix.substr(1) + side_tag;
        row.family = ConstraintFamily::kVolumeFitted;
        row.relation = Relation::kGreaterEqual;
        for (int v : vol_vars) row.terms.emplace_back(v, 1.0);
        if (fit.chi[0] != 0.0) row.terms.emplace_back(o.offset_var, -fit.chi[0]);
        row.rhs = fit.chi[1];
        out.linear.push_back(std::move(row));
      } else {
        QuadraticConstraint q;
        q.name = "VOLQ" + stem + o.suffix.substr(1) + side_tag;
        q.volume_vars = vol_vars;
        q.offset_var = o.offset_var;
        q.chi1 = fit.chi[0];
        q.chi2 = fit.chi[1];
        q.chi3 = fit.chi[2];
        out.quadratic.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace vertalign
