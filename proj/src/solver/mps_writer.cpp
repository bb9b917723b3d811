#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "vertalign/solver.hpp"

namespace vertalign {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void field_line(std::ostream& out, const std::string& a, const std::string& b, const std::string& c) {
  out << "    " << a;
  for (std::size_t i = a.size(); i < 10; ++i) out << ' ';
  out << "  " << b;
  for (std::size_t i = b.size(); i < 10; ++i) out << ' ';
  out << "  " << c << '\n';
}

void bound_line(std::ostream& out, const char* type, const std::string& col, const std::string* value) {
  out << ' ' << type << " BND       " << col;
  if (value) out << "  " << *value;
  out << '\n';
}

}  // namespace

void write_mps(const ModelInstance& inst, std::ostream& out, const std::string& name) {
  const VariableCatalog& cat = inst.catalog;
  const int n = cat.size();

  // Column-wise entries: objective first, then rows in order.
  std::vector<std::vector<std::pair<std::string, double>>> cols(n);
  for (int j = 0; j < n && j < static_cast<int>(inst.objective.size()); ++j) {
    if (inst.objective[j] != 0.0) cols[j].emplace_back("COST", inst.objective[j]);
  }
  for (const auto& r : inst.linear) {
    for (const auto& [j, a] : r.terms) cols[j].emplace_back(r.name, a);
  }
  for (const auto& q : inst.quadratic) {
    for (int v : q.volume_vars) cols[v].emplace_back(q.name, 1.0);
    if (q.chi2 != 0.0) cols[q.offset_var].emplace_back(q.name, -q.chi2);
  }

  out << "NAME          " << name << '\n';
  out << "OBJSENSE\n    MIN\n";
  out << "ROWS\n";
  out << " N  COST\n";
  auto sense = [](Relation r) {
    switch (r) {
      case Relation::kLessEqual: return "L";
      case Relation::kGreaterEqual: return "G";
      case Relation::kEqual: return "E";
    }
    return "E";
  };
  for (const auto& r : inst.linear) out << ' ' << sense(r.relation) << "  " << r.name << '\n';
  for (const auto& q : inst.quadratic) out << " G  " << q.name << '\n';

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const Variable& v = cat[j];
    if (v.integer != in_int) {
      const char* kind = v.integer ? "'INTORG'" : "'INTEND'";
      field_line(out, "MARKER" + std::to_string(marker++), "'MARKER'", kind);
      in_int = v.integer;
    }
    if (cols[j].empty()) field_line(out, v.name, "COST", "0");
    for (const auto& [row, a] : cols[j]) field_line(out, v.name, row, num(a));
  }
  if (in_int) field_line(out, "MARKER" + std::to_string(marker++), "'MARKER'", "'INTEND'");

  out << "RHS\n";
  for (const auto& r : inst.linear) {
    if (r.rhs != 0.0) field_line(out, "RHS", r.name, num(r.rhs));
  }
  for (const auto& q : inst.quadratic) {
    if (q.chi3 != 0.0) field_line(out, "RHS", q.name, num(q.chi3));
  }

  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const Variable& v = cat[j];
    const bool lo_inf = !std::isfinite(v.lower);
    const bool hi_inf = !std::isfinite(v.upper);
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) {
      bound_line(out, "BV", v.name, nullptr);
      continue;
    }
    if (!lo_inf && !hi_inf && v.lower == v.upper) {
      const std::string s = num(v.lower);
      bound_line(out, "FX", v.name, &s);
      continue;
    }
    if (lo_inf && hi_inf) {
      bound_line(out, "FR", v.name, nullptr);
      continue;
    }
    if (lo_inf) {
      bound_line(out, "MI", v.name, nullptr);
    } else if (v.lower != 0.0) {
      const std::string s = num(v.lower);
      bound_line(out, v.integer ? "LI" : "LO", v.name, &s);
    }
    if (!hi_inf) {
      const std::string s = num(v.upper);
      bound_line(out, v.integer ? "UI" : "UP", v.name, &s);
    }
  }

  for (const auto& q : inst.quadratic) {
    if (q.chi1 == 0.0) continue;
    out << "QCMATRIX   " << q.name << '\n';
    const std::string& u = cat[q.offset_var].name;
    field_line(out, u, u, num(-q.chi1));
  }
  out << "ENDATA\n";
}

void export_mps(const ModelInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SolverError("cannot write " + path);
  write_mps(inst, out);
  out.flush();
  if (!out) throw SolverError("failed writing " + path);
}

}  // namespace vertalign
