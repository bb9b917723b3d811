#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vertalign/solver.hpp"

namespace vertalign {
namespace {

using Clock = std::chrono::steady_clock;
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class VarState : unsigned char { kBasic, kLower, kUpper, kFree };

constexpr int kRefactorEvery = 96;
constexpr int kDegenerateLimit = 300;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;

double pow2_round(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(s))));
}

struct Eta {
  int pos;
  double pivot;
  std::vector<int> idx;
  std::vector<double> val;
};

}  // namespace

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kTimeLimit: return "time-limit";
    case LpStatus::kNumerical: return "numerical-failure";
  }
  return "unknown";
}

struct SimplexSolver::Impl {
  int m = 0;
  int n = 0;
  double tol = 1e-9;
  double obj_scale = 1.0;

  // Scaled structural columns; slack column n+i is -e_i.
  std::vector<int> a_start{0};
  std::vector<int> a_index;
  std::vector<double> a_value;
  std::vector<double> col_scale;  // x = col_scale * x'
  std::vector<double> row_scale;  // s' = row_scale * s
  std::vector<double> orig_cost;

  std::vector<double> lower, upper, cost, x;
  std::vector<VarState> state;
  std::vector<int> basis;  // position -> variable
  std::vector<int> pos_of;

  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eta> etas;
  bool factored = false;
  long iterations = 0;

  int total() const { return n + m; }

  template <typename F>
  void for_col(int j, F&& f) const {
    if (j >= n) {
      f(j - n, -1.0);
      return;
    }
    for (int k = a_start[j]; k < a_start[j + 1]; ++k) f(a_index[k], a_value[k]);
  }

  void initial_state(int j) {
    if (std::isfinite(lower[j])) {
      state[j] = VarState::kLower;
      x[j] = lower[j];
    } else if (std::isfinite(upper[j])) {
      state[j] = VarState::kUpper;
      x[j] = upper[j];
    } else {
      state[j] = VarState::kFree;
      x[j] = 0.0;
    }
  }

  void slack_basis() {
    basis.resize(m);
    pos_of.assign(total(), -1);
    for (int j = 0; j < n; ++j) initial_state(j);
    for (int i = 0; i < m; ++i) {
      basis[i] = n + i;
      pos_of[n + i] = i;
      state[n + i] = VarState::kBasic;
    }
    factored = false;
  }

  bool refactor() {
    etas.clear();
    std::vector<Eigen::Triplet<double, int>> trips;
    for (int p = 0; p < m; ++p) {
      for_col(basis[p], [&](int r, double v) { trips.emplace_back(r, p, v); });
    }
    SpMat b(m, m);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    lu.analyzePattern(b);
    lu.factorize(b);
    factored = lu.info() == Eigen::Success;
    return factored;
  }

  void ftran(Eigen::VectorXd& v) const {
    v = lu.solve(v);
    for (const Eta& e : etas) {
      const double vr = v[e.pos] / e.pivot;
      if (vr != 0.0) {
        for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * vr;
      }
      v[e.pos] = vr;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = v[it->pos];
      for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
      v[it->pos] = s / it->pivot;
    }
    v = lu.transpose().solve(v);
  }

  void compute_basic_values() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < total(); ++j) {
      if (state[j] == VarState::kBasic || x[j] == 0.0) continue;
      const double xj = x[j];
      for_col(j, [&](int r, double v) { rhs[r] -= v * xj; });
    }
    ftran(rhs);
    for (int p = 0; p < m; ++p) x[basis[p]] = rhs[p];
  }

  double infeasibility(int j) const {
    if (x[j] < lower[j] - tol) return lower[j] - x[j];
    if (x[j] > upper[j] + tol) return x[j] - upper[j];
    return 0.0;
  }

  bool ensure_factor() {
    if (factored) return true;
    if (refactor()) {
      compute_basic_values();
      return true;
    }
    spdlog::warn("simplex: singular basis, restarting from the slack basis");
    slack_basis();
    if (!refactor()) return false;
    compute_basic_values();
    return true;
  }

  LpStatus run(double seconds, long iteration_limit);
};

LpStatus SimplexSolver::Impl::run(double seconds, long iteration_limit) {
  const auto t0 = Clock::now();
  if (!ensure_factor()) return LpStatus::kNumerical;

  const int nt = total();
  Eigen::VectorXd y(m), alpha(m);
  std::vector<char> rejected(nt, 0);
  bool any_rejected = false;
  int degenerate = 0;
  int recheck = 0;
  long local_iter = 0;

  while (true) {
    if (local_iter >= iteration_limit) return LpStatus::kIterationLimit;
    if ((local_iter & 31) == 0 &&
        std::chrono::duration<double>(Clock::now() - t0).count() > seconds) {
      return LpStatus::kTimeLimit;
    }
    if (static_cast<int>(etas.size()) >= kRefactorEvery) {
      if (!refactor()) {
        factored = false;
        if (!ensure_factor()) return LpStatus::kNumerical;
      }
      compute_basic_values();
    }

    bool infeasible = false;
    for (int p = 0; p < m && !infeasible; ++p) infeasible = infeasibility(basis[p]) > 0.0;
    for (int p = 0; p < m; ++p) {
      const int b = basis[p];
      if (infeasible) {
        y[p] = x[b] < lower[b] - tol ? -1.0 : (x[b] > upper[b] + tol ? 1.0 : 0.0);
      } else {
        y[p] = cost[b];
      }
    }
    btran(y);

    const bool bland = degenerate > kDegenerateLimit;
    int q = -1;
    double best = 0.0;
    double dq = 0.0;
    for (int j = 0; j < nt; ++j) {
      const VarState s = state[j];
      if (s == VarState::kBasic || rejected[j]) continue;
      if (lower[j] == upper[j]) continue;
      double d = infeasible ? 0.0 : cost[j];
      if (j >= n) {
        d += y[j - n];
      } else {
        for (int k = a_start[j]; k < a_start[j + 1]; ++k) d -= y[a_index[k]] * a_value[k];
      }
      double score = 0.0;
      if (s == VarState::kLower && d < -tol) score = -d;
      else if (s == VarState::kUpper && d > tol) score = d;
      else if (s == VarState::kFree && std::abs(d) > tol) score = std::abs(d);
      if (score == 0.0) continue;
      if (bland) {
        q = j;
        dq = d;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        dq = d;
      }
    }

    if (q < 0) {
      if (any_rejected) {
        std::fill(rejected.begin(), rejected.end(), 0);
        any_rejected = false;
        if (!etas.empty()) {
          refactor();
          compute_basic_values();
          continue;
        }
      }
      if (!etas.empty() && recheck < 3) {
        ++recheck;
        if (!refactor()) {
          if (!ensure_factor()) return LpStatus::kNumerical;
        }
        compute_basic_values();
        continue;
      }
      return infeasible ? LpStatus::kInfeasible : LpStatus::kOptimal;
    }

    const double dir = dq < 0.0 ? 1.0 : -1.0;
    alpha.setZero();
    for_col(q, [&](int r, double v) { alpha[r] = v; });
    ftran(alpha);

    // Ratio test; basic p moves at rate -dir * alpha[p] per unit step.
    double theta_max = kInf;
    for (int p = 0; p < m; ++p) {
      const double a = alpha[p];
      if (std::abs(a) < kPivotTol) continue;
      const int b = basis[p];
      const double rate = -dir * a;
      double bound;
      if (rate < 0.0) {
        if (x[b] > upper[b] + tol) bound = upper[b];
        else if (x[b] < lower[b] - tol) continue;
        else bound = lower[b];
      } else {
        if (x[b] < lower[b] - tol) bound = lower[b];
        else if (x[b] > upper[b] + tol) continue;
        else bound = upper[b];
      }
      if (!std::isfinite(bound)) continue;
      const double slack = bland ? 0.0 : tol;
      const double ratio = (std::abs(x[b] - bound) + slack) / std::abs(rate);
      theta_max = std::min(theta_max, ratio);
    }
    const double flip = upper[q] - lower[q];

    int leave = -1;
    double theta = kInf;
    double leave_bound = 0.0;
    if (std::isfinite(theta_max)) {
      double best_pivot = 0.0;
      for (int p = 0; p < m; ++p) {
        const double a = alpha[p];
        if (std::abs(a) < kPivotTol) continue;
        const int b = basis[p];
        const double rate = -dir * a;
        double bound;
        if (rate < 0.0) {
          if (x[b] > upper[b] + tol) bound = upper[b];
          else if (x[b] < lower[b] - tol) continue;
          else bound = lower[b];
        } else {
          if (x[b] < lower[b] - tol) bound = lower[b];
          else if (x[b] > upper[b] + tol) continue;
          else bound = upper[b];
        }
        if (!std::isfinite(bound)) continue;
        const double ratio = std::abs(x[b] - bound) / std::abs(rate);
        if (ratio > theta_max) continue;
        const bool better = bland ? (leave < 0 || ratio < theta - 1e-12 ||
                                     (ratio <= theta + 1e-12 && b < basis[leave]))
                                  : std::abs(a) > best_pivot;
        if (better) {
          best_pivot = std::abs(a);
          leave = p;
          theta = ratio;
          leave_bound = bound;
        }
      }
      if (leave >= 0) {
        const int b = basis[leave];
        const bool wrong_side = (-dir * alpha[leave] < 0.0) ? x[b] < leave_bound : x[b] > leave_bound;
        if (wrong_side) theta = 0.0;
      }
    }

    if (std::isfinite(flip) && flip <= theta) {
      // Bound flip of the entering variable, basis unchanged.
      for (int p = 0; p < m; ++p) x[basis[p]] += -dir * alpha[p] * flip;
      if (state[q] == VarState::kLower) {
        state[q] = VarState::kUpper;
        x[q] = upper[q];
      } else {
        state[q] = VarState::kLower;
        x[q] = lower[q];
      }
      ++iterations;
      ++local_iter;
      degenerate = 0;
      continue;
    }

    if (leave < 0) {
      if (!infeasible) return LpStatus::kUnbounded;
      if (!etas.empty()) {
        refactor();
        compute_basic_values();
        continue;
      }
      rejected[q] = 1;
      any_rejected = true;
      continue;
    }

    if (std::abs(alpha[leave]) < 1e-7 && !etas.empty()) {
      refactor();
      compute_basic_values();
      continue;
    }

    for (int p = 0; p < m; ++p) x[basis[p]] += -dir * alpha[p] * theta;
    x[q] += dir * theta;
    const int b = basis[leave];
    x[b] = leave_bound;
    state[b] = leave_bound == upper[b] && leave_bound != lower[b] ? VarState::kUpper : VarState::kLower;
    if (!std::isfinite(lower[b]) && !std::isfinite(upper[b])) state[b] = VarState::kFree;
    pos_of[b] = -1;
    basis[leave] = q;
    pos_of[q] = leave;
    state[q] = VarState::kBasic;

    Eta eta;
    eta.pos = leave;
    eta.pivot = alpha[leave];
    for (int p = 0; p < m; ++p) {
      if (p != leave && std::abs(alpha[p]) > kDropTol) {
        eta.idx.push_back(p);
        eta.val.push_back(alpha[p]);
      }
    }
    etas.push_back(std::move(eta));

    ++iterations;
    ++local_iter;
    degenerate = theta * std::abs(dq) < 1e-12 ? degenerate + 1 : 0;
    recheck = 0;
    if (any_rejected) {
      std::fill(rejected.begin(), rejected.end(), 0);
      any_rejected = false;
    }
  }
}

SimplexSolver::SimplexSolver(const LpData& lp, double tolerance) : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.m = lp.rows;
  s.n = lp.cols;
  s.tol = tolerance;
  s.a_start = lp.start;
  s.a_index = lp.index;
  s.a_value = lp.value;
  s.orig_cost = lp.cost;
  s.col_scale.assign(s.n, 1.0);
  s.row_scale.assign(s.m, 1.0);

  // Geometric scaling passes over |a_ij|.
  for (int pass = 0; pass < 6; ++pass) {
    std::vector<double> rmin(s.m, kInf), rmax(s.m, 0.0);
    for (int j = 0; j < s.n; ++j) {
      for (int k = s.a_start[j]; k < s.a_start[j + 1]; ++k) {
        const double v = std::abs(s.a_value[k]) * s.col_scale[j] * s.row_scale[s.a_index[k]];
        if (v == 0.0) continue;
        rmin[s.a_index[k]] = std::min(rmin[s.a_index[k]], v);
        rmax[s.a_index[k]] = std::max(rmax[s.a_index[k]], v);
      }
    }
    for (int i = 0; i < s.m; ++i) {
      if (rmax[i] > 0.0) s.row_scale[i] /= std::sqrt(rmin[i] * rmax[i]);
    }
    for (int j = 0; j < s.n; ++j) {
      double cmin = kInf, cmax = 0.0;
      for (int k = s.a_start[j]; k < s.a_start[j + 1]; ++k) {
        const double v = std::abs(s.a_value[k]) * s.col_scale[j] * s.row_scale[s.a_index[k]];
        if (v == 0.0) continue;
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
      }
      if (cmax > 0.0) s.col_scale[j] /= std::sqrt(cmin * cmax);
    }
  }
  for (double& r : s.row_scale) r = pow2_round(r);
  for (double& c : s.col_scale) c = pow2_round(c);
  for (int j = 0; j < s.n; ++j) {
    for (int k = s.a_start[j]; k < s.a_start[j + 1]; ++k) {
      s.a_value[k] *= s.col_scale[j] * s.row_scale[s.a_index[k]];
    }
  }

  const int nt = s.total();
  s.lower.resize(nt);
  s.upper.resize(nt);
  s.cost.assign(nt, 0.0);
  s.x.assign(nt, 0.0);
  s.state.assign(nt, VarState::kLower);
  double cmax = 0.0;
  for (int j = 0; j < s.n; ++j) cmax = std::max(cmax, std::abs(lp.cost[j] * s.col_scale[j]));
  s.obj_scale = cmax > 0.0 ? pow2_round(1.0 / cmax) : 1.0;
  for (int j = 0; j < s.n; ++j) {
    s.lower[j] = lp.col_lower[j] / s.col_scale[j];
    s.upper[j] = lp.col_upper[j] / s.col_scale[j];
    s.cost[j] = lp.cost[j] * s.col_scale[j] * s.obj_scale;
  }
  for (int i = 0; i < s.m; ++i) {
    s.lower[s.n + i] = lp.row_lower[i] * s.row_scale[i];
    s.upper[s.n + i] = lp.row_upper[i] * s.row_scale[i];
  }
  s.slack_basis();
}

SimplexSolver::~SimplexSolver() = default;

LpStatus SimplexSolver::solve(double seconds, long iteration_limit) {
  return impl_->run(seconds, iteration_limit);
}

void SimplexSolver::set_col_bounds(int j, double lower, double upper) {
  Impl& s = *impl_;
  s.lower[j] = lower / s.col_scale[j];
  s.upper[j] = upper / s.col_scale[j];
  if (s.state[j] == VarState::kBasic) return;
  const double old = s.x[j];
  s.initial_state(j);
  if (s.state[j] == VarState::kLower && std::isfinite(s.upper[j]) &&
      std::abs(old - s.upper[j]) < std::abs(old - s.lower[j])) {
    s.state[j] = VarState::kUpper;
    s.x[j] = s.upper[j];
  }
  if (s.x[j] != old && s.factored) s.compute_basic_values();
}

double SimplexSolver::col_lower(int j) const { return impl_->lower[j] * impl_->col_scale[j]; }
double SimplexSolver::col_upper(int j) const { return impl_->upper[j] * impl_->col_scale[j]; }

void SimplexSolver::add_row(const std::vector<std::pair<int, double>>& terms, double lower,
                            double upper) {
  Impl& s = *impl_;
  double vmin = kInf, vmax = 0.0;
  for (const auto& [j, a] : terms) {
    const double v = std::abs(a * s.col_scale[j]);
    if (v == 0.0) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double r = vmax > 0.0 ? pow2_round(1.0 / std::sqrt(vmin * vmax)) : 1.0;
  const int row = s.m;

  // Rebuild the column arrays with the new row appended.
  std::vector<std::vector<std::pair<int, double>>> extra(s.n);
  for (const auto& [j, a] : terms) {
    if (a != 0.0) extra[j].emplace_back(row, a * s.col_scale[j] * r);
  }
  std::vector<int> start(s.n + 1, 0), index;
  std::vector<double> value;
  index.reserve(s.a_index.size() + terms.size());
  value.reserve(s.a_value.size() + terms.size());
  for (int j = 0; j < s.n; ++j) {
    for (int k = s.a_start[j]; k < s.a_start[j + 1]; ++k) {
      index.push_back(s.a_index[k]);
      value.push_back(s.a_value[k]);
    }
    for (const auto& [i, v] : extra[j]) {
      index.push_back(i);
      value.push_back(v);
    }
    start[j + 1] = static_cast<int>(index.size());
  }
  s.a_start = std::move(start);
  s.a_index = std::move(index);
  s.a_value = std::move(value);

  s.m += 1;
  s.row_scale.push_back(r);
  s.lower.push_back(lower * r);
  s.upper.push_back(upper * r);
  s.cost.push_back(0.0);
  s.x.push_back(0.0);
  s.state.push_back(VarState::kBasic);
  s.pos_of.push_back(row);
  s.basis.push_back(s.n + row);
  s.factored = false;
}

int SimplexSolver::rows() const { return impl_->m; }
int SimplexSolver::cols() const { return impl_->n; }

std::vector<double> SimplexSolver::primal() const {
  std::vector<double> out(impl_->n);
  for (int j = 0; j < impl_->n; ++j) out[j] = impl_->x[j] * impl_->col_scale[j];
  return out;
}

double SimplexSolver::objective() const {
  double v = 0.0;
  for (int j = 0; j < impl_->n; ++j) v += impl_->orig_cost[j] * impl_->x[j] * impl_->col_scale[j];
  return v;
}

long SimplexSolver::iterations() const { return impl_->iterations; }

}  // namespace vertalign
