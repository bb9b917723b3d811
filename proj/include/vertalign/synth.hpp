#pragma once

// Seeded synthetic networks, ground profiles and cross-section tables.

#include <cstdint>
#include <random>
#include <string>

#include "vertalign/core.hpp"
#include "vertalign/geometry.hpp"
#include "vertalign/io.hpp"

namespace vertalign {

enum class TerrainKind { kFlat, kSinusoidal, kRamp, kNoisy };
enum class SectionShape { kRectangular, kTrapezoid, kNoisyTrapezoid, kConcave, kIrregular };

const char* terrain_name(TerrainKind kind);
const char* shape_name(SectionShape shape);
TerrainKind parse_terrain(const std::string& text);
SectionShape parse_shape(const std::string& text);

struct ShapeParams {
  SectionShape shape = SectionShape::kTrapezoid;
  double width = 10.0;
  double lower = -3.0;  // deepest cut offset
  double upper = 3.0;   // highest fill offset
  int samples_per_side = 12;
  double alpha_min = 0.5;  // radians
  double alpha_max = 1.2;
  double noise = 0.05;  // relative, noisy trapezoid only
};

/// One cross-section table of the given shape. Areas are non-decreasing away
/// from the ground line and vanish on the opposite side.
CrossSectionTable random_table(const ShapeParams& params, std::mt19937_64& rng, SectionKey key = {});

struct SynthSpec {
  int roads = 1;
  int intersections = 0;
  int segments_per_road = 2;
  int sections_per_segment = 3;
  int sections_per_road = 0;  // when > 0, spread over the segments instead
  double segment_length = 100.0;
  int materials = 1;
  int haul_types = 1;
  int pits = 0;  // alternating borrow and waste

  TerrainKind terrain = TerrainKind::kSinusoidal;
  double base_elevation = 100.0;
  double amplitude = 2.0;
  double wavelength = 250.0;
  double ramp_slope = 0.03;
  double terrain_noise = 0.5;

  SectionShape shape = SectionShape::kTrapezoid;
  double width_min = 8.0;
  double width_max = 12.0;
  double shape_noise = 0.05;
  int samples_per_side = 12;
  double offset_limit = 3.0;
  double grade = 0.08;

  std::uint64_t seed = 0;
};

struct SynthCase {
  RoadNetwork network;
  CrossSectionSet tables;
  GroundProfile profile;
};

SynthCase generate(const SynthSpec& spec);

}  // namespace vertalign
