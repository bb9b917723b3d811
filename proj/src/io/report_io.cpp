#include <json.hpp>

#include <cmath>
#include <cstdio>

#include "vertalign/io.hpp"

namespace vertalign {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

InstanceCounts count_instance(const ModelInstance& inst) {
  InstanceCounts c;
  c.variables = inst.catalog.size();
  c.integers = inst.integer_count();
  c.linear_rows = static_cast<int>(inst.linear.size());
  c.quadratic_rows = static_cast<int>(inst.quadratic.size());
  for (const auto& [fam, n] : inst.family_counts()) c.families[family_name(fam)] = n;
  return c;
}

RunReport make_report(const Solution& sol, const ModelInstance& inst) {
  RunReport r;
  r.model = model_kind_name(inst.kind);
  r.status = status_name(sol.status);
  r.message = sol.message;
  r.has_point = sol.has_point();
  r.counts = count_instance(inst);
  r.iterations = sol.stats.iterations;
  r.nodes = sol.stats.nodes;
  r.cuts = sol.stats.cuts;
  r.solve_seconds = sol.stats.wall_seconds;
  if (sol.has_point()) {
    r.objective = sol.objective;
    r.bound = sol.bound;
    r.gap = std::abs(sol.objective - sol.bound) / std::max(1.0, std::abs(sol.objective));
    const ResidualReport res = validate_solution(inst, sol.values);
    r.residuals = res.family_max;
    r.conservation = res.conservation;
    r.max_residual = res.max_residual();
    r.max_conservation = res.max_conservation();
  }
  return r;
}

std::string report_to_json(const RunReport& r) {
  ojson doc;
  doc["model"] = r.model;
  doc["status"] = r.status;
  doc["message"] = r.message;
  doc["has_point"] = r.has_point;
  doc["objective"] = r.objective;
  doc["bound"] = r.bound;
  doc["gap"] = r.gap;
  ojson counts;
  counts["variables"] = r.counts.variables;
  counts["integers"] = r.counts.integers;
  counts["linear_rows"] = r.counts.linear_rows;
  counts["quadratic_rows"] = r.counts.quadratic_rows;
  counts["families"] = r.counts.families;
  doc["counts"] = counts;
  doc["residuals"] = r.residuals;
  doc["conservation"] = r.conservation;
  doc["max_residual"] = r.max_residual;
  doc["max_conservation"] = r.max_conservation;
  doc["iterations"] = r.iterations;
  doc["nodes"] = r.nodes;
  doc["cuts"] = r.cuts;
  doc["inputs"] = r.inputs;
  doc["seed"] = r.seed;
  doc["timing"] = {{"build_seconds", r.build_seconds}, {"solve_seconds", r.solve_seconds}};
  doc["timestamp"] = r.timestamp;
  return doc.dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    RunReport r;
    r.model = doc.at("model").get<std::string>();
    r.status = doc.at("status").get<std::string>();
    r.message = doc.at("message").get<std::string>();
    r.has_point = doc.at("has_point").get<bool>();
    r.objective = doc.at("objective").get<double>();
    r.bound = doc.at("bound").get<double>();
    r.gap = doc.at("gap").get<double>();
    const json& c = doc.at("counts");
    r.counts.variables = c.at("variables").get<int>();
    r.counts.integers = c.at("integers").get<int>();
    r.counts.linear_rows = c.at("linear_rows").get<int>();
    r.counts.quadratic_rows = c.at("quadratic_rows").get<int>();
    r.counts.families = c.at("families").get<std::map<std::string, int>>();
    r.residuals = doc.at("residuals").get<std::map<std::string, double>>();
    r.conservation = doc.at("conservation").get<std::vector<double>>();
    r.max_residual = doc.at("max_residual").get<double>();
    r.max_conservation = doc.at("max_conservation").get<double>();
    r.iterations = doc.at("iterations").get<long>();
    r.nodes = doc.at("nodes").get<long>();
    r.cuts = doc.at("cuts").get<long>();
    r.inputs = doc.at("inputs").get<std::map<std::string, std::string>>();
    r.seed = doc.at("seed").get<long>();
    r.build_seconds = doc.at("timing").at("build_seconds").get<double>();
    r.solve_seconds = doc.at("timing").at("solve_seconds").get<double>();
    r.timestamp = doc.at("timestamp").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string report_summary(const RunReport& r) {
  std::string s;
  s += "model        " + r.model + "\n";
  s += "status       " + r.status + (r.message.empty() ? "" : " (" + r.message + ")") + "\n";
  if (r.has_point) {
    s += "objective    " + fixed(r.objective, 6) + "\n";
    s += "bound        " + fixed(r.bound, 6) + "\n";
    s += "gap          " + sci(r.gap) + "\n";
  } else {
    s += "objective    n/a\n";
  }
  s += "variables    " + std::to_string(r.counts.variables) + " (" + std::to_string(r.counts.integers) +
       " binary)\n";
  s += "rows         " + std::to_string(r.counts.linear_rows) + " linear, " +
       std::to_string(r.counts.quadratic_rows) + " quadratic\n";
  for (const auto& [fam, n] : r.counts.families) s += "  " + fam + ": " + std::to_string(n) + "\n";
  if (r.has_point) {
    s += "max residual " + sci(r.max_residual) + "\n";
    s += "conservation " + sci(r.max_conservation) + "\n";
  }
  s += "iterations   " + std::to_string(r.iterations) + ", nodes " + std::to_string(r.nodes) + ", cuts " +
       std::to_string(r.cuts) + "\n";
  s += "build time   " + fixed(r.build_seconds, 3) + " s\n";
  s += "solve time   " + fixed(r.solve_seconds, 3) + " s\n";
  return s;
}

void write_report(const RunReport& r, const std::filesystem::path& path) {
  write_text(path, report_to_json(r));
  std::filesystem::path txt = path;
  txt.replace_extension(".txt");
  write_text(txt, report_summary(r));
}

void write_report(const Solution& sol, const ModelInstance& inst, const std::filesystem::path& path) {
  write_report(make_report(sol, inst), path);
}

RunReport load_report(const std::filesystem::path& path) { return parse_report(read_text(path)); }

void write_solution(const Solution& sol, const ModelInstance& inst, const std::filesystem::path& path) {
  ojson doc;
  doc["model"] = model_kind_name(inst.kind);
  doc["status"] = status_name(sol.status);
  doc["objective"] = sol.objective;
  ojson values = ojson::object();
  if (sol.has_point()) {
    for (int k = 0; k < inst.catalog.size(); ++k) values[inst.catalog[k].name] = sol.values[k];
  }
  doc["values"] = values;
  write_text(path, doc.dump(2) + "\n");
}

std::vector<double> load_solution(const std::filesystem::path& path, const ModelInstance& inst) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!doc.contains("values") || !doc["values"].is_object()) {
    throw IoError(path.string() + ": missing 'values' object");
  }
  const json& vals = doc["values"];
  std::vector<double> x(inst.catalog.size(), 0.0);
  for (int k = 0; k < inst.catalog.size(); ++k) {
    const std::string& name = inst.catalog[k].name;
    const auto it = vals.find(name);
    if (it == vals.end() || !it->is_number()) throw IoError(path.string() + ": no value for " + name);
    x[k] = it->get<double>();
  }
  if (vals.size() != x.size()) {
    for (const auto& [name, v] : vals.items()) {
      if (inst.catalog.index_of(name) < 0) throw IoError(path.string() + ": unknown variable " + name);
    }
  }
  return x;
}

}  // namespace vertalign
