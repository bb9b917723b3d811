#include <algorithm>
#include <cmath>
#include <numbers>

#include "vertalign/synth.hpp"

namespace vertalign {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Area at depths x_1 < ... < x_n away from the ground line.
std::vector<double> side_areas(const ShapeParams& p, const std::vector<double>& depth, std::mt19937_64& rng) {
  const double w = p.width;
  const double xmax = depth.empty() ? 1.0 : depth.back();
  std::vector<double> a(depth.size());
  switch (p.shape) {
    case SectionShape::kRectangular:
      for (std::size_t k = 0; k < depth.size(); ++k) a[k] = w * depth[k];
      break;
    case SectionShape::kTrapezoid:
    case SectionShape::kNoisyTrapezoid: {
      const double kappa = 1.0 / std::tan(uniform(rng, p.alpha_min, p.alpha_max)) +
                           1.0 / std::tan(uniform(rng, p.alpha_min, p.alpha_max));
      for (std::size_t k = 0; k < depth.size(); ++k) {
        a[k] = w * depth[k] + 0.5 * kappa * depth[k] * depth[k];
        if (p.shape == SectionShape::kNoisyTrapezoid) a[k] *= std::max(0.0, 1.0 + p.noise * gaussian(rng));
      }
      break;
    }
    case SectionShape::kConcave: {
      const double kappa = uniform(rng, 0.2, 0.9) * w / xmax;
      for (std::size_t k = 0; k < depth.size(); ++k) a[k] = w * depth[k] - 0.5 * kappa * depth[k] * depth[k];
      break;
    }
    case SectionShape::kIrregular: {
      double prev_x = 0.0, acc = 0.0;
      for (std::size_t k = 0; k < depth.size(); ++k) {
        const double r = uniform(rng, 0.0, 1.0) < 0.25 ? uniform(rng, 0.0, 0.3) : uniform(rng, 0.5, 3.0);
        acc += w * (depth[k] - prev_x) * r;
        prev_x = depth[k];
        a[k] = acc;
      }
      break;
    }
  }
  for (std::size_t k = 1; k < a.size(); ++k) a[k] = std::max(a[k], a[k - 1]);
  return a;
}

double terrain(const SynthSpec& s, double station, double phase, double tilt) {
  switch (s.terrain) {
    case TerrainKind::kFlat: return s.base_elevation;
    case TerrainKind::kSinusoidal:
      return s.base_elevation + s.amplitude * std::sin(2.0 * std::numbers::pi * station / s.wavelength + phase);
    case TerrainKind::kRamp: return s.base_elevation + tilt * station;
    case TerrainKind::kNoisy:
      return s.base_elevation +
             0.5 * s.amplitude * std::sin(2.0 * std::numbers::pi * station / s.wavelength + phase);
  }
  return s.base_elevation;
}

std::vector<int> spread(int total, int parts) {
  std::vector<int> out(parts, total / parts);
  for (int k = 0; k < total % parts; ++k) ++out[k];
  return out;
}

}  // namespace

const char* terrain_name(TerrainKind k) {
  switch (k) {
    case TerrainKind::kFlat: return "flat";
    case TerrainKind::kSinusoidal: return "sinusoidal";
    case TerrainKind::kRamp: return "ramp";
    case TerrainKind::kNoisy: return "noisy";
  }
  return "unknown";
}

const char* shape_name(SectionShape s) {
  switch (s) {
    case SectionShape::kRectangular: return "rectangular";
    case SectionShape::kTrapezoid: return "trapezoid";
    case SectionShape::kNoisyTrapezoid: return "noisy-trapezoid";
    case SectionShape::kConcave: return "concave";
    case SectionShape::kIrregular: return "irregular";
  }
  return "unknown";
}

TerrainKind parse_terrain(const std::string& t) {
  for (TerrainKind k : {TerrainKind::kFlat, TerrainKind::kSinusoidal, TerrainKind::kRamp, TerrainKind::kNoisy}) {
    if (t == terrain_name(k)) return k;
  }
  throw std::invalid_argument("unknown terrain '" + t + "'");
}

SectionShape parse_shape(const std::string& t) {
  for (SectionShape s : {SectionShape::kRectangular, SectionShape::kTrapezoid, SectionShape::kNoisyTrapezoid,
                         SectionShape::kConcave, SectionShape::kIrregular}) {
    if (t == shape_name(s)) return s;
  }
  throw std::invalid_argument("unknown cross-section shape '" + t + "'");
}

CrossSectionTable random_table(const ShapeParams& p, std::mt19937_64& rng, SectionKey key) {
  if (!(p.lower < 0.0) || !(p.upper > 0.0) || p.samples_per_side < 1) {
    throw std::invalid_argument("table needs lower < 0 < upper and at least one sample per side");
  }
  const int n = p.samples_per_side;
  std::vector<double> cut_depth(n), fill_depth(n);
  for (int k = 0; k < n; ++k) {
    cut_depth[k] = -p.lower * (k + 1) / n;
    fill_depth[k] = p.upper * (k + 1) / n;
  }
  const std::vector<double> cut = side_areas(p, cut_depth, rng);
  const std::vector<double> fill = side_areas(p, fill_depth, rng);
  CrossSectionTable t;
  t.key = key;
  for (int k = n - 1; k >= 0; --k) t.samples.push_back({-cut_depth[k], cut[k], 0.0});
  t.samples.push_back({0.0, 0.0, 0.0});
  for (int k = 0; k < n; ++k) t.samples.push_back({fill_depth[k], 0.0, fill[k]});
  normalize_table(t);
  return t;
}

SynthCase generate(const SynthSpec& s) {
  if (s.roads < 1 || s.segments_per_road < 1 || s.materials < 1 || s.haul_types < 1) {
    throw std::invalid_argument("synthetic network needs roads, segments, materials and haul types");
  }
  if (2 * s.intersections > s.roads) {
    throw std::invalid_argument("at most roads / 2 intersections are supported");
  }
  std::mt19937_64 rng(s.seed);
  SynthCase out;
  RoadNetwork& net = out.network;
  net.config.grade_lower = -s.grade;
  net.config.grade_upper = s.grade;
  net.config.haul_count = s.haul_types;

  for (int m = 0; m < s.materials; ++m) {
    net.materials.push_back({m + 1, uniform(rng, 1.0, 3.0), uniform(rng, 0.5, 2.0)});
  }
  for (int h = 0; h < s.haul_types; ++h) {
    HaulType ht;
    ht.id = h + 1;
    for (int m = 0; m < s.materials; ++m) {
      // Longer-haul equipment: cheaper per meter, dearer to load.
      ht.haul_cost.push_back(0.02 / (1.0 + 2.0 * h) * uniform(rng, 0.8, 1.2));
      ht.loading_cost.push_back(0.5 * (1.0 + h) * uniform(rng, 0.8, 1.2));
    }
    net.haul_types.push_back(std::move(ht));
  }

  // Topology: intersection e joins the end of road 2e with the start of road
  // 2e + 1; remaining roads attach their start round-robin.
  std::vector<std::vector<Attachment>> atts(s.intersections);
  std::vector<int> start_junction(s.roads, -1), end_junction(s.roads, -1);
  std::vector<std::vector<int>> section_counts(s.roads);
  for (int r = 0; r < s.roads; ++r) {
    section_counts[r] = s.sections_per_road > 0 ? spread(s.sections_per_road, s.segments_per_road)
                                                : std::vector<int>(s.segments_per_road, s.sections_per_segment);
  }
  for (int e = 0; e < s.intersections; ++e) {
    end_junction[2 * e] = e;
    start_junction[2 * e + 1] = e;
  }
  for (int r = 2 * s.intersections; r < s.roads && s.intersections > 0; ++r) {
    start_junction[r] = (r - 2 * s.intersections) % s.intersections;
  }
  std::vector<double> junction_ground(s.intersections);
  for (int e = 0; e < s.intersections; ++e) {
    junction_ground[e] = s.terrain == TerrainKind::kFlat ? s.base_elevation
                                                         : s.base_elevation + uniform(rng, -1.0, 1.0) * s.amplitude;
  }

  for (int r = 0; r < s.roads; ++r) {
    Road road;
    road.id = r + 1;
    double station = 0.0;
    for (int g = 0; g < s.segments_per_road; ++g) {
      const int n = section_counts[r][g];
      if (n < 1) throw std::invalid_argument("every segment needs at least one section");
      road.segments.push_back({station, s.segment_length, n});
      const double step = s.segment_length / n;
      for (int k = 0; k < n; ++k) {
        Section sec;
        sec.station = station + (k + 0.5) * step;
        sec.length = step;
        sec.offset_lower = -s.offset_limit;
        sec.offset_upper = s.offset_limit;
        sec.width = uniform(rng, s.width_min, s.width_max);
        road.sections.push_back(sec);
      }
      station += s.segment_length;
    }
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double tilt = s.ramp_slope * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    for (Section& sec : road.sections) {
      sec.ground_elevation = terrain(s, sec.station, phase, tilt);
      if (s.terrain == TerrainKind::kNoisy) sec.ground_elevation += s.terrain_noise * gaussian(rng);
    }
    // Linear correction so attached end sections meet their intersection.
    const int n = road.section_count();
    const double s0 = road.sections.front().station, s1 = road.sections.back().station;
    const bool has_start = start_junction[r] >= 0, has_end = end_junction[r] >= 0;
    const double shift_end = has_end ? junction_ground[end_junction[r]] - road.sections.back().ground_elevation : 0.0;
    const double shift_start =
        has_start ? junction_ground[start_junction[r]] - road.sections.front().ground_elevation : shift_end;
    const double d1 = has_end ? shift_end : shift_start;
    for (int j = 0; j < n; ++j) {
      Section& sec = road.sections[j];
      const double w = n > 1 ? (sec.station - s0) / (s1 - s0) : 0.0;
      sec.ground_elevation += (1.0 - w) * shift_start + w * d1;
    }
    if (start_junction[r] >= 0) road.sections.front().ground_elevation = junction_ground[start_junction[r]];
    if (end_junction[r] >= 0) road.sections.back().ground_elevation = junction_ground[end_junction[r]];
    if (start_junction[r] >= 0) atts[start_junction[r]].push_back({r, 0});
    if (end_junction[r] >= 0) atts[end_junction[r]].push_back({r, n - 1});
    auto& prof = out.profile[r];
    for (const Section& sec : road.sections) prof.push_back({sec.station, sec.ground_elevation});
    net.roads.push_back(std::move(road));
  }
  for (int e = 0; e < s.intersections; ++e) {
    Intersection x;
    x.id = e + 1;
    x.attachments = atts[e];
    std::sort(x.attachments.begin(), x.attachments.end(),
              [](const Attachment& a, const Attachment& b) { return std::tie(a.road, a.section) < std::tie(b.road, b.section); });
    x.offset_lower = -s.offset_limit;
    x.offset_upper = s.offset_limit;
    net.intersections.push_back(std::move(x));
  }

  for (int p = 0; p < s.pits; ++p) {
    Pit pit;
    pit.kind = p % 2 == 0 ? PitKind::kBorrow : PitKind::kWaste;
    pit.road = static_cast<int>(uniform(rng, 0.0, s.roads)) % s.roads;
    pit.section = static_cast<int>(uniform(rng, 0.0, net.roads[pit.road].section_count())) %
                  net.roads[pit.road].section_count();
    for (int m = 0; m < s.materials; ++m) pit.capacity.push_back(uniform(rng, 500.0, 5000.0));
    pit.dead_haul_distance = uniform(rng, 100.0, 500.0);
    net.pits.push_back(std::move(pit));
  }

  for (int r = 0; r < s.roads; ++r) {
    for (int j = 0; j < net.roads[r].section_count(); ++j) {
      const Section& sec = net.roads[r].sections[j];
      for (int m = 0; m < s.materials; ++m) {
        ShapeParams p;
        p.shape = s.shape;
        p.width = sec.width * (s.materials > 1 ? uniform(rng, 0.3, 1.0) : 1.0);
        p.lower = sec.offset_lower;
        p.upper = sec.offset_upper;
        p.samples_per_side = s.samples_per_side;
        p.noise = s.shape_noise;
        const SectionKey key{r, j, m};
        out.tables[key] = random_table(p, rng, key);
      }
    }
  }
  return out;
}

}  // namespace vertalign
