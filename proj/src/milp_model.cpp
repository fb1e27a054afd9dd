#include <algorithm>
#include <cmath>

#include "sccuc/milp.hpp"

namespace sccuc {

std::size_t MilpModel::add_variable(std::string name, double lower, double upper, VarKind kind,
                                    double objective) {
  vars_.push_back(Variable{std::move(name), lower, upper, kind, objective});
  return vars_.size() - 1;
}

std::size_t MilpModel::add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                                      double rhs) {
  rows_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  return rows_.size() - 1;
}

void MilpModel::set_bounds(std::size_t var, double lower, double upper) {
  auto& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(
      vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

void MilpModel::validate() const {
  for (const auto& v : vars_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInf || v.upper == -kInf)
      throw ModelError("variable " + v.name + ": invalid bounds");
    if (v.lower > v.upper) throw ModelError("variable " + v.name + ": lower bound exceeds upper");
    if (!std::isfinite(v.objective)) throw ModelError("variable " + v.name + ": non-finite cost");
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
      throw ModelError("binary " + v.name + ": bounds outside [0, 1]");
  }
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) throw ModelError("row " + r.name + ": non-finite rhs");
    for (const auto& t : r.terms) {
      if (t.var >= vars_.size()) throw ModelError("row " + r.name + ": unknown variable");
      if (!std::isfinite(t.coef)) throw ModelError("row " + r.name + ": non-finite coefficient");
    }
  }
  if (!std::isfinite(objective_constant_)) throw ModelError("non-finite objective constant");
}

double MilpModel::objective_value(std::span<const double> x) const {
  double obj = objective_constant_;
  for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].objective * x[j];
  return obj;
}

double MilpModel::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max(worst, vars_[j].lower - x[j]);
    worst = std::max(worst, x[j] - vars_[j].upper);
  }
  for (const auto& r : rows_) {
    double act = 0.0;
    for (const auto& t : r.terms) act += t.coef * x[t.var];
    switch (r.sense) {
      case RowSense::LessEqual: worst = std::max(worst, act - r.rhs); break;
      case RowSense::GreaterEqual: worst = std::max(worst, r.rhs - act); break;
      case RowSense::Equal: worst = std::max(worst, std::abs(act - r.rhs)); break;
    }
  }
  return worst;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap-limit";
  }
  return "unknown";
}

}  // namespace sccuc
