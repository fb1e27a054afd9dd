#pragma once

// Self-contained LP / MILP / convex-QP kernel.
//
// Models are minimization problems over bounded continuous or binary
// variables with sparse linear rows. LPs are solved by a dense bounded-variable
// primal simplex (two phases, Dantzig pricing, Bland's rule after stalling);
// MILPs by best-first branch-and-bound on the most fractional binary.

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sccuc/linalg.hpp"

namespace sccuc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  double objective = 0.0;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

class ModelError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MilpModel {
public:
  std::size_t add_variable(std::string name, double lower, double upper,
                           VarKind kind = VarKind::Continuous, double objective = 0.0);
  std::size_t add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, VarKind::Binary, objective);
  }
  std::size_t add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                             double rhs);

  void set_objective(std::size_t var, double coef) { vars_.at(var).objective = coef; }
  void add_objective(std::size_t var, double coef) { vars_.at(var).objective += coef; }
  void set_objective_constant(double c) { objective_constant_ = c; }
  double objective_constant() const noexcept { return objective_constant_; }

  void set_bounds(std::size_t var, double lower, double upper);

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<Constraint>& constraints() const noexcept { return rows_; }
  std::size_t variable_count() const noexcept { return vars_.size(); }
  std::size_t constraint_count() const noexcept { return rows_.size(); }
  std::size_t binary_count() const;

  /// Throws ModelError on dangling references, non-finite data or binaries
  /// with bounds outside [0, 1].
  void validate() const;

  double objective_value(std::span<const double> x) const;
  /// Largest bound or row violation of a point.
  double max_violation(std::span<const double> x) const;

private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  double objective_constant_ = 0.0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  std::vector<double> values;
  std::size_t nodes = 0;        // B&B nodes whose LP was solved
  double best_bound = -kInf;    // global lower bound at termination
  std::size_t iterations = 0;   // simplex pivots (summed over nodes)

  bool optimal() const noexcept { return status == SolveStatus::Optimal; }
};

/// Simplex breakdown (e.g. a vanishing pivot or an inaccurate final point).
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, std::size_t iteration, double pivot)
      : std::runtime_error(what), iteration_(iteration), pivot_(pivot) {}
  std::size_t iteration() const noexcept { return iteration_; }
  double pivot() const noexcept { return pivot_; }

private:
  std::size_t iteration_;
  double pivot_;
};

struct LpOptions {
  std::size_t max_iterations = 200000;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  std::size_t stall_limit = 50;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
};

/// Solves the continuous relaxation (binaries relaxed to [0, 1]).
Solution solve_lp(const MilpModel& m, const LpOptions& opts = {});

/// Same, with per-variable bound overrides (used by branch-and-bound and
/// enumeration oracles).
Solution solve_lp(const MilpModel& m, std::span<const double> lower,
                  std::span<const double> upper, const LpOptions& opts = {});

inline constexpr double kDefaultMipGap = 1e-6;

struct MilpOptions {
  LpOptions lp;
  std::size_t max_nodes = 1000000;
  double integrality_tol = 1e-6;
};

/// Best-first branch-and-bound; terminates when
/// (incumbent − bound) ≤ gap·max(1, |incumbent|).
Solution solve_milp(const MilpModel& m, double gap = kDefaultMipGap,
                    const MilpOptions& opts = {});

// ---------------------------------------------------------------------------
// Convex QP:  min ½ xᵀGx + gᵀx  s.t.  A x ≤ b

enum class QpStatus { Optimal, Infeasible };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  std::vector<double> x;
  std::vector<double> multipliers;  // per inequality row, ≥ 0
  std::vector<std::size_t> active;  // active rows at termination, in order added
  double objective = kInf;
  std::size_t iterations = 0;
};

struct QpOptions {
  /// Relative Tikhonov shift added to G so that PSD Hessians become definite.
  double regularization = 1e-10;
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 100000;
};

/// Dual active-set method (Goldfarb–Idnani). Starts from the unconstrained
/// minimizer and adds the most violated row (lowest index on ties) until the
/// point is feasible; reports Infeasible when a violated row cannot be
/// satisfied by any step.
QpResult solve_qp_active_set(const RMatrix& hessian, std::span<const double> linear,
                             const RMatrix& a, std::span<const double> b,
                             const QpOptions& opts = {});

// ---------------------------------------------------------------------------
// LP-format text

struct LpExport {
  std::string text;
  /// Original name → sanitized name, only for names that changed.
  std::map<std::string, std::string> renamed;
};

/// Minimize / Subject To / Bounds / Binaries / End sections.
LpExport export_lp_file(const MilpModel& m);

/// Reads the subset of LP format written by export_lp_file.
MilpModel import_lp_file(std::string_view text);

}  // namespace sccuc
