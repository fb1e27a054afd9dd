#include <algorithm>
#include <cmath>
#include <queue>

#include "sccuc/milp.hpp"

namespace sccuc {

namespace {

struct Node {
  double bound;
  std::size_t seq;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

}  // namespace

Solution solve_milp(const MilpModel& m, double gap, const MilpOptions& opts) {
  m.validate();
  if (!(gap >= 0.0)) throw ModelError("MIP gap must be non-negative");
  const std::size_t n = m.variable_count();
  const auto& vars = m.variables();

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  {
    Node root{-kInf, 0, std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
      root.lower[j] = vars[j].lower;
      root.upper[j] = vars[j].upper;
    }
    open.push(std::move(root));
  }
  std::size_t next_seq = 1;

  Solution best;
  best.status = SolveStatus::Infeasible;
  double incumbent = kInf;
  auto prune_tol = [&] { return 1e-9 * std::max(1.0, std::abs(incumbent)); };
  std::size_t nodes = 0;
  std::size_t iterations = 0;
  bool stopped_early = false;

  while (!open.empty()) {
    const double lb = open.top().bound;
    if (lb >= incumbent - prune_tol()) break;
    if (std::isfinite(incumbent) && incumbent - lb <= gap * std::max(1.0, std::abs(incumbent))) {
      stopped_early = true;
      break;
    }
    if (nodes >= opts.max_nodes) {
      stopped_early = true;
      break;
    }
    Node node = open.top();
    open.pop();

    Solution lp = solve_lp(m, node.lower, node.upper, opts.lp);
    ++nodes;
    iterations += lp.iterations;
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status == SolveStatus::Unbounded) {
      best.status = SolveStatus::Unbounded;
      best.objective = -kInf;
      best.nodes = nodes;
      best.iterations = iterations;
      return best;
    }
    if (lp.objective >= incumbent - prune_tol()) continue;

    std::size_t branch_var = n;
    double most = opts.integrality_tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (vars[j].kind != VarKind::Binary) continue;
      const double v = lp.values[j];
      const double frac = std::abs(v - std::round(v));
      if (frac > most) {
        most = frac;
        branch_var = j;
      }
    }

    if (branch_var == n) {
      for (std::size_t j = 0; j < n; ++j)
        if (vars[j].kind == VarKind::Binary) lp.values[j] = std::round(lp.values[j]);
      incumbent = m.objective_value(lp.values);
      best.values = std::move(lp.values);
      best.objective = incumbent;
      best.status = SolveStatus::Optimal;
      continue;
    }

    Node down{lp.objective, next_seq++, node.lower, node.upper};
    down.upper[branch_var] = 0.0;
    Node up{lp.objective, next_seq++, std::move(node.lower), std::move(node.upper)};
    up.lower[branch_var] = 1.0;
    open.push(std::move(down));
    open.push(std::move(up));
  }

  best.nodes = nodes;
  best.iterations = iterations;
  if (best.status != SolveStatus::Optimal) {
    best.status = stopped_early ? SolveStatus::GapLimit : SolveStatus::Infeasible;
    best.best_bound = open.empty() ? kInf : open.top().bound;
    return best;
  }
  double bound = incumbent;
  if (!open.empty()) bound = std::min(bound, open.top().bound);
  best.best_bound = bound;
  if (stopped_early && bound < incumbent - prune_tol()) best.status = SolveStatus::GapLimit;
  return best;
}

}  // namespace sccuc
