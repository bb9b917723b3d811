#pragma once

// Built-in solvers: bounded primal simplex, branch-and-bound over the slab
// selectors, and outer approximation of convex quadratic volume bounds.

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vertalign/model.hpp"

namespace vertalign {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BranchingRule { kMostFractional, kFirstFractional };

struct SolverOptions {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-6;  // relative
  double cut_tolerance = 1e-6;
  long node_limit = 1000000;
  double time_limit = 1e30;  // seconds
  BranchingRule branching = BranchingRule::kMostFractional;
  int max_cut_rounds = 1000;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kLimitHit };

const char* status_name(SolveStatus status);

struct SolveStats {
  long iterations = 0;
  long nodes = 0;
  long cuts = 0;
  double wall_seconds = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::kLimitHit;
  std::vector<double> values;  // empty when no point is available
  double objective = 0.0;
  double bound = 0.0;
  SolveStats stats;
  std::string message;

  bool has_point() const { return !values.empty(); }
};

/// Rows rl <= A x <= ru over columns l <= x <= u, minimizing cost . x.
/// A is stored column-wise.
struct LpData {
  int rows = 0;
  int cols = 0;
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> value;

  static LpData from_rows(const std::vector<double>& cost, const std::vector<double>& lower,
                          const std::vector<double>& upper,
                          const std::vector<LinearConstraint>& rows);
};

LpData lp_from_instance(const ModelInstance& instance);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kTimeLimit, kNumerical };

const char* lp_status_name(LpStatus status);

/// Bounded primal revised simplex with a sparse LU basis factor and product
/// form updates. Keeps its basis between calls, so bound changes and added
/// rows are re-solved from the previous basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpData& lp, double tolerance = 1e-9);
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  LpStatus solve(double seconds = 1e30, long iteration_limit = 50000000);

  void set_col_bounds(int j, double lower, double upper);
  double col_lower(int j) const;
  double col_upper(int j) const;
  /// Appends lower <= terms . x <= upper.
  void add_row(const std::vector<std::pair<int, double>>& terms, double lower, double upper);

  int rows() const;
  int cols() const;
  std::vector<double> primal() const;
  double objective() const;
  long iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Solution solve_lp(const ModelInstance& instance, const SolverOptions& options = {});
Solution solve_milp(const ModelInstance& instance, const SolverOptions& options = {});
Solution solve_convex_qcqp(const ModelInstance& instance, const SolverOptions& options = {});

/// Picks the solver matching the instance: quadratic rows, binaries, or plain LP.
Solution solve_instance(const ModelInstance& instance, const SolverOptions& options = {});

void write_mps(const ModelInstance& instance, std::ostream& out, const std::string& name = "VERTALIGN");
void export_mps(const ModelInstance& instance, const std::string& path);

}  // namespace vertalign
