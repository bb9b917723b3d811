#pragma once

// Road-network data model: roads split into quadratic-spline segments and
// cross-section stations, intersections joining road endpoints, borrow/waste
// pits, materials and haul types. All lengths are meters, volumes cubic
// meters; costs are abstract non-negative scalars.
//
// Indices in this API are 0-based. Names written to external files
// (MPS rows/columns, solution files) are 1-based.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertalign {

class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Segment {
  double start_station = 0.0;
  double length = 0.0;
  int section_count = 0;

  bool operator==(const Segment&) const = default;
};

struct Section {
  double station = 0.0;
  double length = 0.0;  // effective length used to turn areas into volumes
  double ground_elevation = 0.0;
  double offset_lower = -1.0;  // deepest cut (negative)
  double offset_upper = 1.0;   // highest fill (positive)
  double width = 0.0;          // design road width

  bool operator==(const Section&) const = default;
};

struct Road {
  int id = 0;
  std::vector<Segment> segments;
  std::vector<Section> sections;

  int section_count() const { return static_cast<int>(sections.size()); }
  int segment_count() const { return static_cast<int>(segments.size()); }

  bool operator==(const Road&) const = default;
};

struct Attachment {
  int road = 0;
  int section = 0;

  bool operator==(const Attachment&) const = default;
};

struct Intersection {
  int id = 0;
  std::vector<Attachment> attachments;
  double offset_lower = -1.0;
  double offset_upper = 1.0;

  bool operator==(const Intersection&) const = default;
};

enum class PitKind { kBorrow, kWaste };

struct Pit {
  PitKind kind = PitKind::kBorrow;
  int road = 0;
  int section = 0;
  std::vector<double> capacity;  // per material
  double dead_haul_distance = 0.0;

  bool operator==(const Pit&) const = default;
};

struct Material {
  int id = 0;
  double excavation_cost = 0.0;
  double embankment_cost = 0.0;

  bool operator==(const Material&) const = default;
};

struct HaulType {
  int id = 0;
  std::vector<double> haul_cost;     // per material, per m^3 per meter
  std::vector<double> loading_cost;  // per material, per m^3

  bool operator==(const HaulType&) const = default;
};

inline constexpr int kDefaultHaulCount = 3;

struct NetworkConfig {
  double grade_lower = -0.1;
  double grade_upper = 0.1;
  int haul_count = kDefaultHaulCount;
  // Volume caps. When unset they default to 1.1x the table volume at the
  // extreme offset (see model/volume).
  std::optional<double> cut_volume_cap;
  std::optional<double> fill_volume_cap;
  // Distance charged (at the haul rate) for transfers through an
  // intersection node. The intersection transfer cost is otherwise
  // unspecified, so it defaults to zero.
  double intersection_transfer_distance = 0.0;
  bool pit_capacity_constraints = true;

  bool operator==(const NetworkConfig&) const = default;
};

struct RoadNetwork {
  std::vector<Road> roads;
  std::vector<Intersection> intersections;
  std::vector<Pit> pits;
  std::vector<Material> materials;
  std::vector<HaulType> haul_types;
  NetworkConfig config;

  int material_count() const { return static_cast<int>(materials.size()); }
  int haul_count() const { return static_cast<int>(haul_types.size()); }

  bool operator==(const RoadNetwork&) const = default;
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(const std::string& code) const;
  std::string summary() const;
};

/// Checks every structural invariant of the network. Never throws; an empty
/// report means the network is well formed.
ValidationReport validate_network(const RoadNetwork& network);

/// Global section index of local section `local` in segment `segment` of
/// road `road`. Throws DomainError for out-of-range arguments.
int section_lookup(const RoadNetwork& network, int road, int segment, int local);

/// Index maps over a validated network: the segment/local position of each
/// section, the intersection attached to a section, pits per section, and the
/// attachment-wise road/section/segment/local lookups.
class NetworkIndex {
 public:
  explicit NetworkIndex(const RoadNetwork& network);

  int section_of(int road, int segment, int local) const;
  int segment_of(int road, int section) const { return segment_of_[road][section]; }
  int local_of(int road, int section) const { return local_of_[road][section]; }

  /// Intersection attached to (road, section), if any.
  std::optional<int> intersection_at(int road, int section) const;
  /// Attachment position within intersection_at(road, section).
  std::optional<int> attachment_at(int road, int section) const;

  std::vector<int> roads_at(int intersection) const;
  std::vector<int> sections_at(int road, int intersection) const;
  int attachment_road(int intersection, int k) const;
  int attachment_section(int intersection, int k) const;
  int attachment_segment(int intersection, int k) const;
  int attachment_local(int intersection, int k) const;

  const std::vector<int>& borrow_pits_at(int road, int section) const {
    return borrow_at_[road][section];
  }
  const std::vector<int>& waste_pits_at(int road, int section) const {
    return waste_at_[road][section];
  }

  const RoadNetwork& network() const { return *network_; }

 private:
  const RoadNetwork* network_;
  std::vector<std::vector<int>> segment_of_;
  std::vector<std::vector<int>> local_of_;
  std::vector<std::vector<int>> first_of_segment_;
  std::vector<std::vector<int>> intersection_of_;
  std::vector<std::vector<int>> attachment_of_;
  std::vector<std::vector<std::vector<int>>> borrow_at_;
  std::vector<std::vector<std::vector<int>>> waste_at_;
};

/// Evaluates the segment polynomial a1 + a2 t + a3 t^2 at t = s - start.
inline double spline_value(double a1, double a2, double a3, double t) {
  return a1 + t * (a2 + t * a3);
}

inline double spline_slope(double a2, double a3, double t) { return a2 + 2.0 * a3 * t; }

}  // namespace vertalign
