#pragma once

// Small hand-built networks shared by the unit and acceptance tests.

#include <vector>

#include "vertalign/core.hpp"
#include "vertalign/geometry.hpp"

namespace fixtures {

using namespace vertalign;

/// One road, evenly spaced stations at sub-interval midpoints.
inline Road make_road(int id, const std::vector<int>& sections_per_segment, double segment_length,
                      const std::vector<double>& ground, double lower = -3.0, double upper = 3.0,
                      double width = 10.0) {
  Road r;
  r.id = id;
  double start = 0.0;
  std::size_t k = 0;
  for (int n : sections_per_segment) {
    r.segments.push_back({start, segment_length, n});
    const double len = segment_length / n;
    for (int j = 0; j < n; ++j) {
      Section s;
      s.station = start + (j + 0.5) * len;
      s.length = len;
      s.ground_elevation = k < ground.size() ? ground[k] : 100.0;
      s.offset_lower = lower;
      s.offset_upper = upper;
      s.width = width;
      r.sections.push_back(s);
      ++k;
    }
    start += segment_length;
  }
  return r;
}

inline Material material(int id, double p = 2.0, double q = 1.0) { return {id, p, q}; }

inline HaulType haul(int id, int materials, double c = 0.01, double y = 0.5) {
  return {id, std::vector<double>(materials, c), std::vector<double>(materials, y)};
}

/// Single road, one material, one haul type.
inline RoadNetwork single_road(const std::vector<int>& sections_per_segment, const std::vector<double>& ground,
                               double segment_length = 100.0) {
  RoadNetwork net;
  net.roads.push_back(make_road(1, sections_per_segment, segment_length, ground));
  net.materials.push_back(material(1));
  net.haul_types.push_back(haul(1, 1));
  net.config.haul_count = 1;
  net.config.grade_lower = -0.08;
  net.config.grade_upper = 0.08;
  return net;
}

/// Trapezoid tables for every section and material of the network.
inline CrossSectionSet trapezoid_tables(const RoadNetwork& net, double alpha = 0.8, int samples = 12) {
  CrossSectionSet out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    const Road& r = net.roads[i];
    for (int j = 0; j < r.section_count(); ++j) {
      const Section& s = r.sections[j];
      for (int m = 0; m < net.material_count(); ++m) {
        const auto g = TrapezoidGeometry::symmetric(s.width / (m + 1), 1.0, alpha, alpha);
        out.emplace(SectionKey{i, j, m}, trapezoid_table(g, s.offset_lower, s.offset_upper, samples, {i, j, m}));
      }
    }
  }
  return out;
}

}  // namespace fixtures
