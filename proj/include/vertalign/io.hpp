#pragma once

// File formats. Networks are JSON documents; ground profiles and
// cross-section tables are CSV. Road and section references in files are
// 1-based positions (road 1 is the first entry of "roads").

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vertalign/core.hpp"
#include "vertalign/geometry.hpp"
#include "vertalign/model.hpp"
#include "vertalign/solver.hpp"

namespace vertalign {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfilePoint {
  double station = 0.0;
  double elevation = 0.0;

  bool operator==(const ProfilePoint&) const = default;
};

/// Ground profile per road (0-based road index), stations strictly increasing.
using GroundProfile = std::map<int, std::vector<ProfilePoint>>;

/// Linear interpolation, clamped to the end points.
double ground_at(const std::vector<ProfilePoint>& profile, double station);

/// Parses a network document. Compact roads (segments given as
/// {length, sections} without a section list) take ground elevations from
/// `profile`. Unknown fields are rejected with their JSON path. The result is
/// validated; failures carry the validation summary.
RoadNetwork parse_network(const std::string& text, const GroundProfile* profile = nullptr);
RoadNetwork load_network(const std::filesystem::path& path, const GroundProfile* profile = nullptr);

/// Canonical explicit form; parse_network(network_to_json(n)) == n.
std::string network_to_json(const RoadNetwork& network);
void write_network(const RoadNetwork& network, const std::filesystem::path& path);

GroundProfile parse_profile(const std::string& text);
GroundProfile load_profile(const std::filesystem::path& path);
void write_profile(const GroundProfile& profile, const std::filesystem::path& path);

/// Tables keyed by 0-based (road, section, material); offsets sorted and
/// sign rules checked. With a network, every section must be covered.
CrossSectionSet parse_cross_sections(const std::string& text, const RoadNetwork* network = nullptr);
CrossSectionSet load_cross_sections(const std::filesystem::path& path,
                                    const RoadNetwork* network = nullptr);
void write_cross_sections(const CrossSectionSet& tables, const std::filesystem::path& path);

struct InstanceCounts {
  int variables = 0;
  int integers = 0;
  int linear_rows = 0;
  int quadratic_rows = 0;
  std::map<std::string, int> families;

  bool operator==(const InstanceCounts&) const = default;
};

InstanceCounts count_instance(const ModelInstance& instance);

struct RunReport {
  std::string model;
  std::string status;
  std::string message;
  bool has_point = false;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  InstanceCounts counts;
  std::map<std::string, double> residuals;
  std::vector<double> conservation;
  double max_residual = 0.0;
  double max_conservation = 0.0;
  long iterations = 0;
  long nodes = 0;
  long cuts = 0;
  std::map<std::string, std::string> inputs;
  long seed = 0;
  // Excluded from determinism comparisons.
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string timestamp;

  bool operator==(const RunReport&) const = default;
};

RunReport make_report(const Solution& solution, const ModelInstance& instance);

std::string report_to_json(const RunReport& report);
RunReport parse_report(const std::string& text);
std::string report_summary(const RunReport& report);

/// Writes the JSON report to `path` and the text summary next to it
/// (same stem, .txt).
void write_report(const RunReport& report, const std::filesystem::path& path);
void write_report(const Solution& solution, const ModelInstance& instance,
                  const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

/// Variable values by name, in catalog order.
void write_solution(const Solution& solution, const ModelInstance& instance,
                    const std::filesystem::path& path);
/// Values aligned with the instance catalog; names missing from the file are
/// an error.
std::vector<double> load_solution(const std::filesystem::path& path, const ModelInstance& instance);

struct RoadPlot {
  int road = 0;
  std::vector<double> stations;
  std::vector<double> ground;
  std::vector<double> offsets;
  std::vector<double> design;  // spline at each station
  std::vector<double> knot_stations;
  std::vector<double> knot_elevations;
};

std::vector<RoadPlot> profile_plot_data(const RoadNetwork& network, const VariableCatalog& catalog,
                                        const std::vector<double>& values);

std::string profile_svg(const RoadNetwork& network, const VariableCatalog& catalog,
                        const std::vector<double>& values);
void write_profile_svg(const RoadNetwork& network, const VariableCatalog& catalog,
                       const std::vector<double>& values, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vertalign
