#include <algorithm>
#include <charconv>
#include <sstream>

#include "vertalign/io.hpp"

namespace vertalign {
namespace {

constexpr const char* kProfileHeader = "road_id,station_m,elevation_m";
constexpr const char* kSectionHeader = "road_id,section,material,offset_m,cut_area_m2,fill_area_m2";

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

struct CsvRows {
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
};

CsvRows split_csv(const std::string& text, const char* header, std::size_t width) {
  CsvRows out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!seen_header) {
      std::string h;
      for (char c : t) {
        if (c != ' ') h += c;
      }
      if (h != header) throw IoError("line " + std::to_string(n) + ": expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = t.find(',', pos);
      cells.push_back(trim(std::string_view(t).substr(pos, comma == std::string::npos ? t.npos : comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != width) {
      throw IoError("line " + std::to_string(n) + ": expected " + std::to_string(width) + " fields, got " +
                    std::to_string(cells.size()));
    }
    out.rows.push_back(std::move(cells));
    out.lines.push_back(n);
  }
  if (!seen_header) throw IoError(std::string("missing header '") + header + "'");
  return out;
}

double parse_double(const std::string& s, int line, const char* field) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw IoError("line " + std::to_string(line) + ": bad " + field + " '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, int line, const char* field) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line) + ": bad " + field + " '" + s + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double ground_at(const std::vector<ProfilePoint>& p, double s) {
  if (p.empty()) throw IoError("empty ground profile");
  if (s <= p.front().station) return p.front().elevation;
  if (s >= p.back().station) return p.back().elevation;
  const auto it = std::upper_bound(p.begin(), p.end(), s,
                                   [](double x, const ProfilePoint& q) { return x < q.station; });
  const ProfilePoint& b = *it;
  const ProfilePoint& a = *(it - 1);
  const double w = (s - a.station) / (b.station - a.station);
  return a.elevation + w * (b.elevation - a.elevation);
}

GroundProfile parse_profile(const std::string& text) {
  const CsvRows csv = split_csv(text, kProfileHeader, 3);
  GroundProfile out;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const int line = csv.lines[i];
    const int road = parse_int(r[0], line, "road_id");
    if (road < 1) throw IoError("line " + std::to_string(line) + ": road_id must be >= 1");
    auto& pts = out[road - 1];
    const ProfilePoint p{parse_double(r[1], line, "station_m"), parse_double(r[2], line, "elevation_m")};
    if (!pts.empty() && p.station <= pts.back().station) {
      throw IoError("line " + std::to_string(line) + ": stations of road " + std::to_string(road) +
                    " must be strictly increasing");
    }
    pts.push_back(p);
  }
  return out;
}

GroundProfile load_profile(const std::filesystem::path& path) {
  try {
    return parse_profile(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_profile(const GroundProfile& profile, const std::filesystem::path& path) {
  std::string out = std::string(kProfileHeader) + "\n";
  for (const auto& [road, pts] : profile) {
    for (const auto& p : pts) {
      out += std::to_string(road + 1) + "," + fmt(p.station) + "," + fmt(p.elevation) + "\n";
    }
  }
  write_text(path, out);
}

CrossSectionSet parse_cross_sections(const std::string& text, const RoadNetwork* network) {
  const CsvRows csv = split_csv(text, kSectionHeader, 6);
  CrossSectionSet out;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const int line = csv.lines[i];
    const SectionKey key{parse_int(r[0], line, "road_id") - 1, parse_int(r[1], line, "section") - 1,
                         parse_int(r[2], line, "material") - 1};
    if (key.road < 0 || key.section < 0 || key.material < 0) {
      throw IoError("line " + std::to_string(line) + ": road_id, section and material are 1-based");
    }
    CrossSectionTable& t = out[key];
    t.key = key;
    t.samples.push_back({parse_double(r[3], line, "offset_m"), parse_double(r[4], line, "cut_area_m2"),
                         parse_double(r[5], line, "fill_area_m2")});
  }
  for (auto& [key, t] : out) {
    try {
      normalize_table(t);
    } catch (const GeometryError& e) {
      throw IoError(e.what());
    }
  }
  if (network) {
    try {
      check_tables(*network, out);
    } catch (const ModelError& e) {
      throw IoError(e.what());
    }
  }
  return out;
}

CrossSectionSet load_cross_sections(const std::filesystem::path& path, const RoadNetwork* network) {
  try {
    return parse_cross_sections(read_text(path), network);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_cross_sections(const CrossSectionSet& tables, const std::filesystem::path& path) {
  std::string out = std::string(kSectionHeader) + "\n";
  for (const auto& [key, t] : tables) {
    const std::string prefix = std::to_string(key.road + 1) + "," + std::to_string(key.section + 1) + "," +
                               std::to_string(key.material + 1) + ",";
    for (const auto& s : t.samples) {
      out += prefix + fmt(s.offset) + "," + fmt(s.cut_area) + "," + fmt(s.fill_area) + "\n";
    }
  }
  write_text(path, out);
}

}  // namespace vertalign
