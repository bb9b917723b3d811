#include <spdlog/spdlog.h>

#include <chrono>

#include "vertalign/solver.hpp"

namespace vertalign {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kLimitHit: return "limit-hit";
  }
  return "unknown";
}

LpData LpData::from_rows(const std::vector<double>& cost, const std::vector<double>& lower,
                         const std::vector<double>& upper,
                         const std::vector<LinearConstraint>& rows) {
  LpData lp;
  lp.cols = static_cast<int>(cost.size());
  lp.rows = static_cast<int>(rows.size());
  lp.cost = cost;
  lp.col_lower = lower;
  lp.col_upper = upper;
  std::vector<int> count(lp.cols, 0);
  for (const auto& r : rows) {
    lp.row_lower.push_back(r.relation == Relation::kLessEqual ? -kInf : r.rhs);
    lp.row_upper.push_back(r.relation == Relation::kGreaterEqual ? kInf : r.rhs);
    for (const auto& [j, a] : r.terms) {
      if (j < 0 || j >= lp.cols) throw SolverError("row " + r.name + " references a missing column");
      ++count[j];
    }
  }
  lp.start.assign(lp.cols + 1, 0);
  for (int j = 0; j < lp.cols; ++j) lp.start[j + 1] = lp.start[j] + count[j];
  lp.index.resize(lp.start.back());
  lp.value.resize(lp.start.back());
  std::vector<int> fill(lp.start.begin(), lp.start.end() - 1);
  for (int i = 0; i < lp.rows; ++i) {
    for (const auto& [j, a] : rows[i].terms) {
      lp.index[fill[j]] = i;
      lp.value[fill[j]] = a;
      ++fill[j];
    }
  }
  return lp;
}

LpData lp_from_instance(const ModelInstance& inst) {
  const int n = inst.catalog.size();
  std::vector<double> lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    lo[k] = inst.catalog[k].lower;
    hi[k] = inst.catalog[k].upper;
  }
  std::vector<double> cost = inst.objective;
  cost.resize(n, 0.0);
  return LpData::from_rows(cost, lo, hi, inst.linear);
}

Solution solve_lp(const ModelInstance& inst, const SolverOptions& opt) {
  if (inst.integer_count() > 0) throw SolverError("solve_lp: instance has integer variables");
  if (!inst.quadratic.empty()) throw SolverError("solve_lp: instance has quadratic constraints");
  const auto t0 = std::chrono::steady_clock::now();
  SimplexSolver lp(lp_from_instance(inst), opt.feasibility_tolerance * 1e-2);
  const LpStatus st = lp.solve(opt.time_limit);
  Solution sol;
  sol.stats.iterations = lp.iterations();
  sol.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sol.message = lp_status_name(st);
  switch (st) {
    case LpStatus::kOptimal:
      sol.status = SolveStatus::kOptimal;
      sol.values = lp.primal();
      sol.objective = lp.objective();
      sol.bound = sol.objective;
      break;
    case LpStatus::kInfeasible: sol.status = SolveStatus::kInfeasible; break;
    case LpStatus::kUnbounded: sol.status = SolveStatus::kUnbounded; break;
    default: sol.status = SolveStatus::kLimitHit; break;
  }
  spdlog::debug("lp: {} after {} iterations", sol.message, sol.stats.iterations);
  return sol;
}

Solution solve_instance(const ModelInstance& inst, const SolverOptions& opt) {
  if (!inst.quadratic.empty()) return solve_convex_qcqp(inst, opt);
  if (inst.integer_count() > 0) return solve_milp(inst, opt);
  return solve_lp(inst, opt);
}

}  // namespace vertalign
