#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "vertalign/oracle.hpp"

namespace vertalign {
namespace {

std::string num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

FitSet angle_fit_set(const RoadNetwork& net, const CrossSectionSet& tables) {
  FitSet out;
  for (const auto& [key, table] : tables) {
    if (key.road >= static_cast<int>(net.roads.size()) ||
        key.section >= net.roads[key.road].section_count()) {
      continue;
    }
    const Section& s = net.roads[key.road].sections[key.section];
    const AngleFit fit = angle_baseline_fit(table, s.width, s.length);
    out[key] = angle_fit_models(fit, table.min_offset(), table.max_offset());
  }
  return out;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kUva: return "uva";
    case Variant::kCuva: return "cuva";
    case Variant::kAngleBaseline: return "angle";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "uva") return Variant::kUva;
  if (text == "cuva") return Variant::kCuva;
  if (text == "angle") return Variant::kAngleBaseline;
  throw OracleError("unknown model variant '" + text + "' (expected uva, cuva or angle)");
}

std::string ComparisonTable::to_csv() const {
  std::string out =
      "Variant,Roads,Stations,Intersections,Slabs,Status,Objective,Time in seconds,Speedup,Cost difference %\n";
  for (const auto& r : rows) {
    out += r.variant + "," + std::to_string(r.roads) + "," + std::to_string(r.stations) + "," +
           std::to_string(r.intersections) + "," + std::to_string(r.slabs) + "," + r.status + "," +
           num(r.objective, 6) + "," + num(r.mean_seconds, 4) + "," + num(r.speedup, 3) + "," +
           num(r.cost_difference, 4) + "\n";
  }
  return out;
}

ComparisonTable compare_models(const RoadNetwork& net, const CrossSectionSet& tables,
                               const std::vector<Variant>& variants, const CompareOptions& opt) {
  if (variants.empty()) throw OracleError("no variants to compare");
  if (opt.runs < 1) throw OracleError("runs must be at least 1");
  const CapSet caps = volume_caps(net, tables);
  int stations = 0;
  for (const Road& r : net.roads) stations += r.section_count();

  ComparisonTable table;
  for (Variant v : variants) {
    ModelInstance inst;
    switch (v) {
      case Variant::kUva: inst = build_uva(net, make_slabs(net, tables, opt.slabs, opt.slabs), caps); break;
      case Variant::kCuva: inst = build_cuva(net, fit_volume_models(net, tables, opt.fit), caps); break;
      case Variant::kAngleBaseline: inst = build_cuva(net, angle_fit_set(net, tables), caps); break;
    }
    ComparisonRow row;
    row.variant = variant_name(v);
    row.roads = static_cast<int>(net.roads.size());
    row.stations = stations;
    row.intersections = static_cast<int>(net.intersections.size());
    row.slabs = v == Variant::kUva ? opt.slabs : 0;
    double total = 0.0;
    Solution sol;
    for (int run = 0; run < opt.runs; ++run) {
      const auto t0 = std::chrono::steady_clock::now();
      sol = solve_instance(inst, opt.solver);
      total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    row.status = status_name(sol.status);
    row.objective = sol.has_point() ? sol.objective : std::nan("");
    row.mean_seconds = total / opt.runs;
    spdlog::info("compare: {} {} objective {} in {:.3f} s", row.variant, row.status, row.objective,
                 row.mean_seconds);
    table.rows.push_back(row);
  }
  const ComparisonRow& base = table.rows.front();
  for (auto& r : table.rows) {
    r.speedup = r.mean_seconds > 0.0 ? base.mean_seconds / r.mean_seconds : 1.0;
    r.cost_difference = 100.0 * (r.objective - base.objective) / std::max(std::abs(base.objective), 1.0);
  }
  return table;
}

}  // namespace vertalign
