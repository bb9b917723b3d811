#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

#include "vertalign/solver.hpp"

namespace vertalign {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int kStallRounds = 25;

// Tangent of chi1 u^2 + chi2 u + chi3 at u0, as a row sum(V) - slope u >= rhs.
void add_tangent(SimplexSolver& lp, const QuadraticConstraint& q, double u0) {
  std::vector<std::pair<int, double>> terms;
  for (int v : q.volume_vars) terms.emplace_back(v, 1.0);
  const double slope = 2.0 * q.chi1 * u0 + q.chi2;
  if (slope != 0.0) terms.emplace_back(q.offset_var, -slope);
  lp.add_row(terms, q.chi3 - q.chi1 * u0 * u0, kInf);
}

}  // namespace

Solution solve_convex_qcqp(const ModelInstance& inst, const SolverOptions& opt) {
  if (inst.integer_count() > 0) throw SolverError("outer approximation does not handle integer variables");
  for (const auto& q : inst.quadratic) {
    if (q.chi1 < 0.0) throw SolverError(q.name + " is not convex (negative quadratic coefficient)");
  }
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  SimplexSolver lp(lp_from_instance(inst), opt.feasibility_tolerance * 1e-2);
  long cuts = 0;
  for (const auto& q : inst.quadratic) {
    const Variable& u = inst.catalog[q.offset_var];
    for (double u0 : {u.lower, 0.0, u.upper}) {
      if (!std::isfinite(u0)) continue;
      add_tangent(lp, q, u0);
      ++cuts;
    }
  }

  Solution sol;
  double best_violation = kInf;
  int stall = 0;
  int round = 0;
  while (true) {
    const LpStatus st = lp.solve(std::max(opt.time_limit - elapsed(), 0.0));
    sol.stats.iterations = lp.iterations();
    sol.stats.cuts = cuts;
    sol.stats.wall_seconds = elapsed();
    if (st == LpStatus::kInfeasible) {
      sol.status = SolveStatus::kInfeasible;
      sol.message = "linear relaxation infeasible";
      return sol;
    }
    if (st == LpStatus::kUnbounded) {
      sol.status = SolveStatus::kUnbounded;
      sol.message = "outer approximation unbounded";
      return sol;
    }
    if (st != LpStatus::kOptimal) {
      sol.status = SolveStatus::kLimitHit;
      sol.message = std::string("lp ") + lp_status_name(st);
      return sol;
    }
    std::vector<double> x = lp.primal();
    sol.values = x;
    sol.objective = lp.objective();
    sol.bound = sol.objective;

    double worst = 0.0;
    int added = 0;
    for (const auto& q : inst.quadratic) {
      const double v = q.violation(x);
      worst = std::max(worst, v);
      if (v > opt.cut_tolerance) {
        add_tangent(lp, q, x[q.offset_var]);
        ++added;
      }
    }
    cuts += added;
    sol.stats.cuts = cuts;
    spdlog::debug("oa: round {} objective {:.6f} max violation {:.3e}", round, sol.objective, worst);
    if (added == 0) {
      sol.status = SolveStatus::kOptimal;
      sol.message = "optimal";
      return sol;
    }
    if (worst < best_violation * (1.0 - 1e-9)) {
      best_violation = worst;
      stall = 0;
    } else if (++stall >= kStallRounds) {
      sol.status = SolveStatus::kLimitHit;
      sol.message = "cut loop stalled";
      return sol;
    }
    if (++round >= opt.max_cut_rounds || elapsed() > opt.time_limit) {
      sol.status = SolveStatus::kLimitHit;
      sol.message = "cut round limit";
      return sol;
    }
  }
}

}  // namespace vertalign
