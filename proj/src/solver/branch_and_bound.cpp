#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <map>

#include "vertalign/solver.hpp"

namespace vertalign {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntTol = 1e-6;
constexpr int kHeuristicEvery = 50;

struct Fix {
  int var;
  double lower;
  double upper;
};

struct Node {
  std::vector<Fix> fixes;
  double bound = -kInf;
};

class Search {
 public:
  Search(const ModelInstance& inst, const SolverOptions& opt)
      : inst_(inst), opt_(opt), lp_(lp_from_instance(inst), opt.feasibility_tolerance * 1e-2) {
    for (int k = 0; k < inst.catalog.size(); ++k) {
      if (!inst.catalog[k].integer) continue;
      ints_.push_back(k);
      root_[k] = {inst.catalog[k].lower, inst.catalog[k].upper};
    }
    current_ = root_;
  }

  Solution run() {
    start_ = Clock::now();
    Solution sol;
    std::multimap<double, Node> open;
    open.emplace(-kInf, Node{});
    double pruned_bound = kInf;
    bool limit = false;
    long nodes = 0;

    while (!open.empty() && !limit) {
      auto it = open.begin();
      Node node = std::move(it->second);
      open.erase(it);

      // Depth-first dive from this node.
      while (true) {
        if (nodes >= opt_.node_limit || elapsed() > opt_.time_limit) {
          limit = true;
          open.emplace(node.bound, std::move(node));
          break;
        }
        if (has_incumbent_ && node.bound >= cutoff()) {
          pruned_bound = std::min(pruned_bound, node.bound);
          break;
        }
        ++nodes;
        apply(node.fixes);
        const LpStatus st = lp_.solve(remaining());
        if (st == LpStatus::kUnbounded) {
          sol.status = SolveStatus::kUnbounded;
          sol.message = "relaxation unbounded";
          return finish(sol, nodes);
        }
        if (st == LpStatus::kInfeasible) break;
        if (st != LpStatus::kOptimal) {
          limit = true;
          open.emplace(node.bound, std::move(node));
          break;
        }
        const double value = lp_.objective();
        const std::vector<double> x = lp_.primal();
        node.bound = std::max(node.bound, value);
        if (has_incumbent_ && value >= cutoff()) {
          pruned_bound = std::min(pruned_bound, value);
          break;
        }
        if (nodes == 1 || nodes % kHeuristicEvery == 0) {
          heuristic(x);
          apply(node.fixes);
          if (has_incumbent_ && value >= cutoff()) {
            pruned_bound = std::min(pruned_bound, value);
            break;
          }
        }
        const int j = pick(x);
        if (j < 0) {
          offer(x, value);
          break;
        }
        const double f = x[j];
        const auto [lo, hi] = bounds_of(node.fixes, j);
        Node down{node.fixes, node.bound};
        down.fixes.push_back({j, lo, std::floor(f)});
        Node up{node.fixes, node.bound};
        up.fixes.push_back({j, std::ceil(f), hi});
        const bool round_up = f - std::floor(f) >= 0.5;
        Node& next = round_up ? up : down;
        Node& other = round_up ? down : up;
        open.emplace(other.bound, std::move(other));
        node = std::move(next);
      }
    }

    if (!has_incumbent_) {
      sol.status = limit ? SolveStatus::kLimitHit : SolveStatus::kInfeasible;
      sol.message = limit ? "limit reached before an integer point was found" : "no integer point";
      return finish(sol, nodes);
    }
    sol.status = limit ? SolveStatus::kLimitHit : SolveStatus::kOptimal;
    sol.values = incumbent_;
    sol.objective = incumbent_value_;
    double bound = std::min(incumbent_value_, pruned_bound);
    for (const auto& [b, n] : open) bound = std::min(bound, b);
    sol.bound = bound;
    sol.message = limit ? "limit reached" : "optimal";
    return finish(sol, nodes);
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  double remaining() const { return std::max(opt_.time_limit - elapsed(), 0.0); }

  double cutoff() const {
    return incumbent_value_ - opt_.optimality_tolerance * std::max(1.0, std::abs(incumbent_value_));
  }

  std::pair<double, double> bounds_of(const std::vector<Fix>& fixes, int j) const {
    std::pair<double, double> b = root_.at(j);
    for (const Fix& f : fixes) {
      if (f.var == j) b = {f.lower, f.upper};
    }
    return b;
  }

  void set(int j, std::pair<double, double> b) {
    auto& cur = current_[j];
    if (cur == b) return;
    cur = b;
    lp_.set_col_bounds(j, b.first, b.second);
  }

  void apply(const std::vector<Fix>& fixes) {
    std::map<int, std::pair<double, double>> want = root_;
    for (const Fix& f : fixes) want[f.var] = {f.lower, f.upper};
    for (const auto& [j, b] : want) set(j, b);
  }

  int pick(const std::vector<double>& x) const {
    int best = -1;
    double score = 0.0;
    for (int j : ints_) {
      const double frac = x[j] - std::floor(x[j]);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist <= kIntTol) continue;
      if (opt_.branching == BranchingRule::kFirstFractional) return j;
      if (dist > score + 1e-12) {
        score = dist;
        best = j;
      }
    }
    return best;
  }

  void offer(std::vector<double> x, double value) {
    if (has_incumbent_ && value >= incumbent_value_) return;
    for (int j : ints_) x[j] = std::round(x[j]);
    has_incumbent_ = true;
    incumbent_ = std::move(x);
    incumbent_value_ = value;
    spdlog::debug("b&b: incumbent {:.6f}", value);
  }

  // Canonical in-order fill of each slab block, then re-solve with the
  // selectors fixed.
  void heuristic(const std::vector<double>& x) {
    if (inst_.blocks.empty()) return;
    for (const IncrementalBlock& blk : inst_.blocks) {
      double total = 0.0;
      for (int v : blk.depth_vars) total += std::max(x[v], 0.0);
      double filled = 0.0;
      for (std::size_t k = 0; k < blk.select_vars.size(); ++k) {
        filled += blk.heights[k];
        const double b = total > filled + 1e-9 ? 1.0 : 0.0;
        set(blk.select_vars[k], {b, b});
      }
    }
    const LpStatus st = lp_.solve(remaining());
    if (st == LpStatus::kOptimal && pick(lp_.primal()) < 0) offer(lp_.primal(), lp_.objective());
  }

  Solution& finish(Solution& sol, long nodes) {
    sol.stats.nodes = nodes;
    sol.stats.iterations = lp_.iterations();
    sol.stats.wall_seconds = elapsed();
    spdlog::debug("b&b: {} after {} nodes", status_name(sol.status), nodes);
    return sol;
  }

  const ModelInstance& inst_;
  const SolverOptions& opt_;
  SimplexSolver lp_;
  std::vector<int> ints_;
  std::map<int, std::pair<double, double>> root_;
  std::map<int, std::pair<double, double>> current_;
  Clock::time_point start_;
  bool has_incumbent_ = false;
  std::vector<double> incumbent_;
  double incumbent_value_ = kInf;
};

}  // namespace

Solution solve_milp(const ModelInstance& inst, const SolverOptions& opt) {
  if (inst.integer_count() == 0) return solve_lp(inst, opt);
  Search search(inst, opt);
  return search.run();
}

}  // namespace vertalign
