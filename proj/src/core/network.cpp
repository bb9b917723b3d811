#include "vertalign/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace vertalign {
namespace {

constexpr double kStationTol = 1e-6;
constexpr double kElevationTol = 1e-6;

class IssueSink {
 public:
  explicit IssueSink(ValidationReport& report) : report_(report) {}

  template <typename... Args>
  void add(const std::string& code, const Args&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    report_.issues.push_back({code, os.str()});
  }

 private:
  ValidationReport& report_;
};

bool valid_section(const RoadNetwork& network, int road, int section) {
  return road >= 0 && road < static_cast<int>(network.roads.size()) && section >= 0 &&
         section < network.roads[road].section_count();
}

void check_road(const RoadNetwork& network, int r, IssueSink& sink) {
  const Road& road = network.roads[r];
  if (road.segments.empty()) {
    sink.add("road-no-segments", "road ", road.id, " has no segments");
    return;
  }
  if (road.sections.empty()) {
    sink.add("road-no-sections", "road ", road.id, " has no sections");
    return;
  }
  int total = 0;
  for (int g = 0; g < road.segment_count(); ++g) {
    const Segment& seg = road.segments[g];
    if (!(seg.length > 0.0)) {
      sink.add("segment-length", "road ", road.id, " segment ", g + 1, " has non-positive length");
    }
    if (seg.section_count < 1) {
      sink.add("segment-empty", "road ", road.id, " segment ", g + 1, " has no sections");
    }
    if (g > 0) {
      const Segment& prev = road.segments[g - 1];
      if (std::abs(prev.start_station + prev.length - seg.start_station) > kStationTol) {
        sink.add("segment-gap", "road ", road.id, " segment ", g + 1,
                 " does not start where segment ", g, " ends");
      }
    }
    total += std::max(seg.section_count, 0);
  }
  if (total != road.section_count()) {
    sink.add("section-count", "road ", road.id, " declares ", total, " sections in segments but has ",
             road.section_count());
    return;
  }
  int j = 0;
  for (int g = 0; g < road.segment_count(); ++g) {
    const Segment& seg = road.segments[g];
    for (int k = 0; k < seg.section_count; ++k, ++j) {
      const Section& s = road.sections[j];
      if (s.station < seg.start_station - kStationTol ||
          s.station > seg.start_station + seg.length + kStationTol) {
        sink.add("section-outside-segment", "road ", road.id, " section ", j + 1,
                 " station lies outside segment ", g + 1);
      }
    }
  }
  for (int i = 0; i < road.section_count(); ++i) {
    const Section& s = road.sections[i];
    if (i > 0 && !(s.station > road.sections[i - 1].station)) {
      sink.add("station-order", "road ", road.id, " section ", i + 1, " station is not increasing");
    }
    if (!(s.length > 0.0)) {
      sink.add("section-length", "road ", road.id, " section ", i + 1, " has non-positive length");
    }
    if (!(s.offset_lower < 0.0 && s.offset_upper > 0.0)) {
      sink.add("offset-bounds", "road ", road.id, " section ", i + 1,
               " offset bounds must satisfy lower < 0 < upper");
    }
    if (!(s.width > 0.0)) {
      sink.add("section-width", "road ", road.id, " section ", i + 1, " has non-positive width");
    }
  }
}

}  // namespace

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& issue : issues) os << issue.code << ": " << issue.message << "\n";
  return os.str();
}

ValidationReport validate_network(const RoadNetwork& network) {
  ValidationReport report;
  IssueSink sink(report);

  const int nm = network.material_count();
  if (nm == 0) sink.add("no-materials", "material set is empty");
  if (network.haul_types.empty()) sink.add("no-haul-types", "haul type set is empty");
  if (network.config.haul_count != network.haul_count()) {
    sink.add("haul-count", "config haul count ", network.config.haul_count, " differs from ",
             network.haul_count(), " declared haul types");
  }
  if (!(network.config.grade_lower < network.config.grade_upper)) {
    sink.add("grade-bounds", "grade lower bound must be below the upper bound");
  }
  for (auto cap : {network.config.cut_volume_cap, network.config.fill_volume_cap}) {
    if (cap && !(*cap > 0.0)) sink.add("volume-cap", "volume caps must be positive");
  }
  if (network.config.intersection_transfer_distance < 0.0) {
    sink.add("transfer-distance", "intersection transfer distance must be non-negative");
  }
  for (const Material& m : network.materials) {
    if (m.excavation_cost < 0.0 || m.embankment_cost < 0.0) {
      sink.add("material-cost", "material ", m.id, " has a negative cost");
    }
  }
  for (const HaulType& h : network.haul_types) {
    if (static_cast<int>(h.haul_cost.size()) != nm ||
        static_cast<int>(h.loading_cost.size()) != nm) {
      sink.add("haul-cost-size", "haul type ", h.id, " must list one cost per material");
      continue;
    }
    for (int m = 0; m < nm; ++m) {
      if (h.haul_cost[m] < 0.0 || h.loading_cost[m] < 0.0) {
        sink.add("haul-cost", "haul type ", h.id, " has a negative cost");
      }
    }
  }

  for (int r = 0; r < static_cast<int>(network.roads.size()); ++r) check_road(network, r, sink);

  std::set<std::pair<int, int>> attached;
  for (const Intersection& e : network.intersections) {
    std::set<std::pair<int, int>> distinct;
    bool in_range = true;
    for (const Attachment& a : e.attachments) {
      if (!valid_section(network, a.road, a.section)) {
        sink.add("attachment-range", "intersection ", e.id, " references a missing road section");
        in_range = false;
        continue;
      }
      distinct.insert({a.road, a.section});
    }
    if (distinct.size() < 2) {
      sink.add("intersection-arity", "intersection ", e.id,
               " needs at least two distinct road attachments");
    }
    if (distinct.size() != e.attachments.size() && in_range) {
      sink.add("attachment-duplicate", "intersection ", e.id, " lists an attachment twice");
    }
    if (!(e.offset_lower <= 0.0 && e.offset_upper >= 0.0 && e.offset_lower < e.offset_upper)) {
      sink.add("intersection-offset-bounds", "intersection ", e.id,
               " offset bounds must satisfy lower <= 0 <= upper");
    }
    if (!in_range) continue;
    for (const auto& key : distinct) {
      if (!attached.insert(key).second) {
        sink.add("section-multiply-attached", "road ", network.roads[key.first].id, " section ",
                 key.second + 1, " joins more than one intersection");
      }
    }
    for (const Attachment& a : e.attachments) {
      const Road& road = network.roads[a.road];
      const bool endpoint = a.section == 0 || a.section == road.section_count() - 1;
      if (!endpoint) {
        sink.add("intersection-not-endpoint", "intersection ", e.id,
                 " attached to a mid-road section of road ", road.id);
      }
      if (road.section_count() < 2) {
        sink.add("attached-road-too-short", "road ", road.id,
                 " must have at least two sections to join an intersection");
      }
      const Section& s = road.sections[a.section];
      if (e.offset_lower < s.offset_lower - kElevationTol ||
          e.offset_upper > s.offset_upper + kElevationTol) {
        sink.add("intersection-offset-range", "intersection ", e.id,
                 " offset bounds exceed those of road ", road.id, " section ", a.section + 1);
      }
    }
    const Section& first = network.roads[e.attachments[0].road].sections[e.attachments[0].section];
    for (const Attachment& a : e.attachments) {
      const Section& s = network.roads[a.road].sections[a.section];
      if (std::abs(s.ground_elevation - first.ground_elevation) > kElevationTol) {
        sink.add("intersection-elevation", "intersection ", e.id,
                 " attached sections disagree on ground elevation");
        break;
      }
    }
  }

  for (std::size_t k = 0; k < network.pits.size(); ++k) {
    const Pit& pit = network.pits[k];
    if (!valid_section(network, pit.road, pit.section)) {
      sink.add("pit-range", "pit ", k + 1, " references a missing road section");
    }
    if (static_cast<int>(pit.capacity.size()) != nm) {
      sink.add("pit-capacity-size", "pit ", k + 1, " must list one capacity per material");
    }
    for (double c : pit.capacity) {
      if (c < 0.0) sink.add("pit-capacity", "pit ", k + 1, " has a negative capacity");
    }
    if (pit.dead_haul_distance < 0.0) {
      sink.add("pit-distance", "pit ", k + 1, " has a negative dead haul distance");
    }
  }
  return report;
}

int section_lookup(const RoadNetwork& network, int road, int segment, int local) {
  if (road < 0 || road >= static_cast<int>(network.roads.size())) {
    throw DomainError("section_lookup: road index out of range");
  }
  const Road& r = network.roads[road];
  if (segment < 0 || segment >= r.segment_count()) {
    throw DomainError("section_lookup: segment index out of range");
  }
  if (local < 0 || local >= r.segments[segment].section_count) {
    throw DomainError("section_lookup: local section index out of range");
  }
  int offset = 0;
  for (int g = 0; g < segment; ++g) offset += r.segments[g].section_count;
  return offset + local;
}

NetworkIndex::NetworkIndex(const RoadNetwork& network) : network_(&network) {
  const int nr = static_cast<int>(network.roads.size());
  segment_of_.resize(nr);
  local_of_.resize(nr);
  first_of_segment_.resize(nr);
  intersection_of_.resize(nr);
  attachment_of_.resize(nr);
  borrow_at_.resize(nr);
  waste_at_.resize(nr);
  for (int r = 0; r < nr; ++r) {
    const Road& road = network.roads[r];
    const int n = road.section_count();
    segment_of_[r].assign(n, -1);
    local_of_[r].assign(n, -1);
    intersection_of_[r].assign(n, -1);
    attachment_of_[r].assign(n, -1);
    borrow_at_[r].resize(n);
    waste_at_[r].resize(n);
    int j = 0;
    for (int g = 0; g < road.segment_count(); ++g) {
      first_of_segment_[r].push_back(j);
      for (int k = 0; k < road.segments[g].section_count && j < n; ++k, ++j) {
        segment_of_[r][j] = g;
        local_of_[r][j] = k;
      }
    }
  }
  for (int e = 0; e < static_cast<int>(network.intersections.size()); ++e) {
    const auto& atts = network.intersections[e].attachments;
    for (int k = 0; k < static_cast<int>(atts.size()); ++k) {
      intersection_of_[atts[k].road][atts[k].section] = e;
      attachment_of_[atts[k].road][atts[k].section] = k;
    }
  }
  for (int p = 0; p < static_cast<int>(network.pits.size()); ++p) {
    const Pit& pit = network.pits[p];
    auto& slot = pit.kind == PitKind::kBorrow ? borrow_at_ : waste_at_;
    slot[pit.road][pit.section].push_back(p);
  }
}

int NetworkIndex::section_of(int road, int segment, int local) const {
  return section_lookup(*network_, road, segment, local);
}

std::optional<int> NetworkIndex::intersection_at(int road, int section) const {
  const int e = intersection_of_[road][section];
  if (e < 0) return std::nullopt;
  return e;
}

std::optional<int> NetworkIndex::attachment_at(int road, int section) const {
  const int k = attachment_of_[road][section];
  if (k < 0) return std::nullopt;
  return k;
}

std::vector<int> NetworkIndex::roads_at(int intersection) const {
  std::vector<int> roads;
  for (const Attachment& a : network_->intersections[intersection].attachments) {
    if (std::find(roads.begin(), roads.end(), a.road) == roads.end()) roads.push_back(a.road);
  }
  return roads;
}

std::vector<int> NetworkIndex::sections_at(int road, int intersection) const {
  std::vector<int> sections;
  for (const Attachment& a : network_->intersections[intersection].attachments) {
    if (a.road == road) sections.push_back(a.section);
  }
  return sections;
}

int NetworkIndex::attachment_road(int intersection, int k) const {
  return network_->intersections[intersection].attachments.at(k).road;
}

int NetworkIndex::attachment_section(int intersection, int k) const {
  return network_->intersections[intersection].attachments.at(k).section;
}

int NetworkIndex::attachment_segment(int intersection, int k) const {
  const auto& a = network_->intersections[intersection].attachments.at(k);
  return segment_of_[a.road][a.section];
}

int NetworkIndex::attachment_local(int intersection, int k) const {
  const auto& a = network_->intersections[intersection].attachments.at(k);
  return local_of_[a.road][a.section];
}

}  // namespace vertalign
