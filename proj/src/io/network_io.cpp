#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "vertalign/io.hpp"

namespace vertalign {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Object view that rejects keys outside the allowed set.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<const char*> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw IoError(path_ + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!ok.count(k)) throw IoError("unknown field '" + k + "' at " + path_);
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string at(const char* key) const { return path_ + "." + key; }

  const json& raw(const char* key) const {
    if (!j_.contains(key)) throw IoError("missing field '" + std::string(key) + "' at " + path_);
    return j_.at(key);
  }

  double num(const char* key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw IoError(at(key) + ": expected a number");
    return v.get<double>();
  }
  double num(const char* key, double fallback) const { return has(key) ? num(key) : fallback; }

  int integer(const char* key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw IoError(at(key) + ": expected an integer");
    return v.get<int>();
  }
  int integer(const char* key, int fallback) const { return has(key) ? integer(key) : fallback; }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw IoError(at(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const char* key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw IoError(at(key) + ": expected a string");
    return v.get<std::string>();
  }

  const json& array(const char* key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw IoError(at(key) + ": expected an array");
    return v;
  }

  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    const json& a = array(key);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) throw IoError(at(key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(a[i].get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

NetworkConfig parse_config(const json& j) {
  Fields f(j, "config",
           {"grade_lower", "grade_upper", "haul_count", "cut_volume_cap", "fill_volume_cap",
            "intersection_transfer_distance", "pit_capacity_constraints"});
  NetworkConfig c;
  c.grade_lower = f.num("grade_lower", c.grade_lower);
  c.grade_upper = f.num("grade_upper", c.grade_upper);
  c.haul_count = f.integer("haul_count", c.haul_count);
  if (f.has("cut_volume_cap")) c.cut_volume_cap = f.num("cut_volume_cap");
  if (f.has("fill_volume_cap")) c.fill_volume_cap = f.num("fill_volume_cap");
  c.intersection_transfer_distance = f.num("intersection_transfer_distance", 0.0);
  c.pit_capacity_constraints = f.boolean("pit_capacity_constraints", true);
  return c;
}

Road parse_road(const json& j, std::size_t r, const GroundProfile* profile) {
  const std::string path = item("roads", r);
  Fields f(j, path,
           {"id", "segments", "sections", "start_station", "width", "offset_lower", "offset_upper",
            "ground"});
  Road road;
  road.id = f.integer("id", static_cast<int>(r) + 1);
  const json& segs = f.array("segments");

  if (f.has("sections")) {
    for (std::size_t g = 0; g < segs.size(); ++g) {
      Fields s(segs[g], item(path + ".segments", g), {"start_station", "length", "section_count"});
      road.segments.push_back({s.num("start_station"), s.num("length"), s.integer("section_count")});
    }
    const json& secs = f.array("sections");
    for (std::size_t k = 0; k < secs.size(); ++k) {
      Fields s(secs[k], item(path + ".sections", k),
               {"station", "length", "ground_elevation", "offset_lower", "offset_upper", "width"});
      Section sec;
      sec.station = s.num("station");
      sec.length = s.num("length");
      sec.ground_elevation = s.num("ground_elevation");
      sec.offset_lower = s.num("offset_lower");
      sec.offset_upper = s.num("offset_upper");
      sec.width = s.num("width", 0.0);
      road.sections.push_back(sec);
    }
    return road;
  }

  // Compact form: equal sub-intervals per segment, stations at their midpoints.
  const double width = f.num("width", 0.0);
  const double lo = f.num("offset_lower", -1.0);
  const double hi = f.num("offset_upper", 1.0);
  double station = f.num("start_station", 0.0);
  for (std::size_t g = 0; g < segs.size(); ++g) {
    Fields s(segs[g], item(path + ".segments", g), {"length", "sections"});
    Segment seg{station, s.num("length"), s.integer("sections")};
    if (seg.section_count <= 0) throw IoError(s.at("sections") + ": must be positive");
    const double step = seg.length / seg.section_count;
    for (int k = 0; k < seg.section_count; ++k) {
      Section sec;
      sec.station = station + (k + 0.5) * step;
      sec.length = step;
      sec.offset_lower = lo;
      sec.offset_upper = hi;
      sec.width = width;
      road.sections.push_back(sec);
    }
    road.segments.push_back(seg);
    station += seg.length;
  }
  if (f.has("ground")) {
    const std::vector<double> ground = f.numbers("ground");
    if (ground.size() != road.sections.size()) {
      throw IoError(f.at("ground") + ": expected " + std::to_string(road.sections.size()) + " values");
    }
    for (std::size_t k = 0; k < ground.size(); ++k) road.sections[k].ground_elevation = ground[k];
  } else {
    const auto it = profile ? profile->find(static_cast<int>(r)) : GroundProfile::const_iterator{};
    if (!profile || it == profile->end()) {
      throw IoError(path + ": compact road needs a 'ground' list or a ground profile for road " +
                    std::to_string(r + 1));
    }
    for (Section& sec : road.sections) sec.ground_elevation = ground_at(it->second, sec.station);
  }
  return road;
}

std::string locate(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

RoadNetwork parse_network(const std::string& text, const GroundProfile* profile) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("syntax error at " + locate(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  Fields top(doc, "network", {"config", "materials", "haul_types", "roads", "intersections", "pits"});
  RoadNetwork net;
  if (top.has("config")) net.config = parse_config(top.raw("config"));

  const json& mats = top.array("materials");
  for (std::size_t i = 0; i < mats.size(); ++i) {
    Fields f(mats[i], item("materials", i), {"id", "excavation_cost", "embankment_cost"});
    net.materials.push_back({f.integer("id", static_cast<int>(i) + 1), f.num("excavation_cost"),
                             f.num("embankment_cost")});
  }
  const json& hauls = top.array("haul_types");
  for (std::size_t i = 0; i < hauls.size(); ++i) {
    Fields f(hauls[i], item("haul_types", i), {"id", "haul_cost", "loading_cost"});
    net.haul_types.push_back(
        {f.integer("id", static_cast<int>(i) + 1), f.numbers("haul_cost"), f.numbers("loading_cost")});
  }
  if (!top.has("config") || !doc["config"].contains("haul_count")) {
    net.config.haul_count = static_cast<int>(net.haul_types.size());
  }

  const json& roads = top.array("roads");
  for (std::size_t r = 0; r < roads.size(); ++r) net.roads.push_back(parse_road(roads[r], r, profile));

  if (top.has("intersections")) {
    const json& xs = top.array("intersections");
    for (std::size_t e = 0; e < xs.size(); ++e) {
      const std::string path = item("intersections", e);
      Fields f(xs[e], path, {"id", "attachments", "offset_lower", "offset_upper"});
      Intersection x;
      x.id = f.integer("id", static_cast<int>(e) + 1);
      x.offset_lower = f.num("offset_lower", x.offset_lower);
      x.offset_upper = f.num("offset_upper", x.offset_upper);
      const json& atts = f.array("attachments");
      for (std::size_t k = 0; k < atts.size(); ++k) {
        Fields a(atts[k], item(path + ".attachments", k), {"road", "section"});
        x.attachments.push_back({a.integer("road") - 1, a.integer("section") - 1});
      }
      net.intersections.push_back(std::move(x));
    }
  }

  if (top.has("pits")) {
    const json& pits = top.array("pits");
    for (std::size_t p = 0; p < pits.size(); ++p) {
      Fields f(pits[p], item("pits", p), {"kind", "road", "section", "capacity", "dead_haul_distance"});
      Pit pit;
      const std::string kind = f.text("kind");
      if (kind == "borrow") pit.kind = PitKind::kBorrow;
      else if (kind == "waste") pit.kind = PitKind::kWaste;
      else throw IoError(f.at("kind") + ": expected 'borrow' or 'waste', got '" + kind + "'");
      pit.road = f.integer("road") - 1;
      pit.section = f.integer("section") - 1;
      pit.capacity = f.numbers("capacity");
      pit.dead_haul_distance = f.num("dead_haul_distance", 0.0);
      net.pits.push_back(std::move(pit));
    }
  }

  const ValidationReport rep = validate_network(net);
  if (!rep.ok()) throw IoError("network failed validation:\n" + rep.summary());
  return net;
}

RoadNetwork load_network(const std::filesystem::path& path, const GroundProfile* profile) {
  try {
    return parse_network(read_text(path), profile);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string network_to_json(const RoadNetwork& net) {
  ojson doc;
  ojson cfg;
  cfg["grade_lower"] = net.config.grade_lower;
  cfg["grade_upper"] = net.config.grade_upper;
  cfg["haul_count"] = net.config.haul_count;
  if (net.config.cut_volume_cap) cfg["cut_volume_cap"] = *net.config.cut_volume_cap;
  if (net.config.fill_volume_cap) cfg["fill_volume_cap"] = *net.config.fill_volume_cap;
  cfg["intersection_transfer_distance"] = net.config.intersection_transfer_distance;
  cfg["pit_capacity_constraints"] = net.config.pit_capacity_constraints;
  doc["config"] = cfg;

  doc["materials"] = ojson::array();
  for (const auto& m : net.materials) {
    doc["materials"].push_back(
        {{"id", m.id}, {"excavation_cost", m.excavation_cost}, {"embankment_cost", m.embankment_cost}});
  }
  doc["haul_types"] = ojson::array();
  for (const auto& h : net.haul_types) {
    doc["haul_types"].push_back({{"id", h.id}, {"haul_cost", h.haul_cost}, {"loading_cost", h.loading_cost}});
  }
  doc["roads"] = ojson::array();
  for (const auto& r : net.roads) {
    ojson road;
    road["id"] = r.id;
    road["segments"] = ojson::array();
    for (const auto& g : r.segments) {
      road["segments"].push_back(
          {{"start_station", g.start_station}, {"length", g.length}, {"section_count", g.section_count}});
    }
    road["sections"] = ojson::array();
    for (const auto& s : r.sections) {
      road["sections"].push_back({{"station", s.station},
                                  {"length", s.length},
                                  {"ground_elevation", s.ground_elevation},
                                  {"offset_lower", s.offset_lower},
                                  {"offset_upper", s.offset_upper},
                                  {"width", s.width}});
    }
    doc["roads"].push_back(road);
  }
  doc["intersections"] = ojson::array();
  for (const auto& x : net.intersections) {
    ojson e;
    e["id"] = x.id;
    e["attachments"] = ojson::array();
    for (const auto& a : x.attachments) e["attachments"].push_back({{"road", a.road + 1}, {"section", a.section + 1}});
    e["offset_lower"] = x.offset_lower;
    e["offset_upper"] = x.offset_upper;
    doc["intersections"].push_back(e);
  }
  doc["pits"] = ojson::array();
  for (const auto& p : net.pits) {
    doc["pits"].push_back({{"kind", p.kind == PitKind::kBorrow ? "borrow" : "waste"},
                           {"road", p.road + 1},
                           {"section", p.section + 1},
                           {"capacity", p.capacity},
                           {"dead_haul_distance", p.dead_haul_distance}});
  }
  return doc.dump(2) + "\n";
}

void write_network(const RoadNetwork& net, const std::filesystem::path& path) {
  write_text(path, network_to_json(net));
}

}  // namespace vertalign
