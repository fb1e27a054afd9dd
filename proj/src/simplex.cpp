// Dense bounded-variable primal simplex.
//
// Every row i is written as  a_iᵀx − r_i = 0  with a row variable r_i whose
// bounds encode the sense and right-hand side. Rows whose initial activity
// violates those bounds receive an artificial variable; phase one minimizes
// their sum, phase two the model objective. The tableau holds B⁻¹[A | −I | art].

#include <algorithm>
#include <cmath>

#include "sccuc/milp.hpp"

namespace sccuc {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

enum class PhaseOutcome { Optimal, Unbounded };

class Tableau {
public:
  Tableau(const MilpModel& m, std::span<const double> lower, std::span<const double> upper,
          const LpOptions& opts, bool textbook)
      : model_(m), opts_(opts), n_(m.variable_count()), m_(m.constraint_count()), textbook_(textbook),
        bland_(textbook) {
    build(lower, upper);
  }

  PhaseOutcome phase_one() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t k = art_begin_; k < cols_; ++k) cost[k] = 1.0;
    price_from(cost);
    return run();
  }

  double infeasibility() const {
    double s = 0.0;
    for (std::size_t k = art_begin_; k < cols_; ++k) s += x_[k];
    return s;
  }

  /// Pivots basic artificials out where possible and fixes all artificials at 0.
  void retire_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < art_begin_) continue;
      std::size_t best = cols_;
      double best_mag = 1e-7;
      const double* row = &t_[r * cols_];
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (pos_[j] >= 0) continue;
        if (std::abs(row[j]) > best_mag) {
          best_mag = std::abs(row[j]);
          best = j;
        }
      }
      if (best < cols_) pivot(r, best);
    }
    for (std::size_t k = art_begin_; k < cols_; ++k) {
      lo_[k] = 0.0;
      up_[k] = 0.0;
      if (pos_[k] < 0) x_[k] = 0.0;
    }
  }

  PhaseOutcome phase_two() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = model_.variables()[j].objective;
    price_from(cost);
    bland_ = textbook_;
    degenerate_run_ = 0;
    return run();
  }

  /// Structural part of the current point, with round-off just outside a
  /// bound snapped back.
  std::vector<double> solution() const {
    std::vector<double> out(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      if (out[j] < lo_[j] && out[j] > lo_[j] - 1e-9) out[j] = lo_[j];
      if (out[j] > up_[j] && out[j] < up_[j] + 1e-9) out[j] = up_[j];
    }
    return out;
  }

  /// Recomputes basic values from the original rows with a fresh basis
  /// factorization (O(m³), so only used when the tableau point has drifted).
  std::vector<double> refined_solution() {
    RMatrix basis_matrix(m_, m_);
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t col = basis_[r];
      for (std::size_t i = 0; i < m_; ++i) basis_matrix(i, r) = column_entry(i, col);
    }
    for (std::size_t j = 0; j < cols_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = column_entry(i, j);
        if (a != 0.0) rhs[i] -= a * x_[j];
      }
    }
    if (m_ > 0) {
      const auto lu = lu_factor(basis_matrix);
      if (!lu.singular()) {
        const auto xb = solve(lu, std::span<const double>(rhs));
        for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] = xb[r];
      }
    }
    return solution();
  }

  std::size_t iterations() const noexcept { return iterations_; }

private:
  void build(std::span<const double> lower, std::span<const double> upper) {
    const auto& vars = model_.variables();
    const auto& rows = model_.constraints();
    // Dense copy of A for activity and refinement.
    a_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& term : rows[i].terms) a_[i * n_ + term.var] += term.coef;

    lo_.assign(n_ + m_, 0.0);
    up_.assign(n_ + m_, 0.0);
    x_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      if (vars[j].kind == VarKind::Binary) {
        lo_[j] = std::max(lo_[j], 0.0);
        up_[j] = std::min(up_[j], 1.0);
      }
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        x_[j] = up_[j];
      } else {
        x_[j] = 0.0;
      }
    }
    std::vector<double> activity(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t r = n_ + i;
      switch (rows[i].sense) {
        case RowSense::LessEqual: lo_[r] = -kInf; up_[r] = rows[i].rhs; break;
        case RowSense::GreaterEqual: lo_[r] = rows[i].rhs; up_[r] = kInf; break;
        case RowSense::Equal: lo_[r] = rows[i].rhs; up_[r] = rows[i].rhs; break;
      }
      double act = 0.0;
      for (std::size_t j = 0; j < n_; ++j) act += a_[i * n_ + j] * x_[j];
      activity[i] = act;
    }
    // Decide which rows need an artificial.
    std::vector<int> sigma(m_, 0);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t r = n_ + i;
      if (activity[i] < lo_[r] - opts_.feasibility_tol) {
        sigma[i] = 1;
      } else if (activity[i] > up_[r] + opts_.feasibility_tol) {
        sigma[i] = -1;
      }
      if (sigma[i] != 0) ++n_art;
    }
    art_begin_ = n_ + m_;
    cols_ = art_begin_ + n_art;
    lo_.resize(cols_, 0.0);
    up_.resize(cols_, kInf);
    x_.resize(cols_, 0.0);
    t_.assign(m_ * cols_, 0.0);
    basis_.assign(m_, 0);
    pos_.assign(cols_, -1);

    std::size_t art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &t_[i * cols_];
      const std::size_t r = n_ + i;
      if (sigma[i] == 0) {
        // Basis column is −e_i: negate the row.
        for (std::size_t j = 0; j < n_; ++j) row[j] = -a_[i * n_ + j];
        row[r] = 1.0;
        basis_[i] = r;
        pos_[r] = static_cast<int>(i);
        x_[r] = activity[i];
      } else {
        const double s = sigma[i];
        const double bound = s > 0 ? lo_[r] : up_[r];
        for (std::size_t j = 0; j < n_; ++j) row[j] = s * a_[i * n_ + j];
        row[r] = -s;
        row[art] = 1.0;
        art_sigma_.push_back(s);
        art_row_.push_back(i);
        basis_[i] = art;
        pos_[art] = static_cast<int>(i);
        x_[r] = bound;
        x_[art] = std::abs(bound - activity[i]);
        ++art;
      }
    }
  }

  /// Entry (i, col) of the original [A | −I | art] matrix.
  double column_entry(std::size_t i, std::size_t col) const {
    if (col < n_) return a_[i * n_ + col];
    if (col < art_begin_) return col - n_ == i ? -1.0 : 0.0;
    const std::size_t k = col - art_begin_;
    return art_row_[k] == i ? art_sigma_[k] : 0.0;
  }

  void price_from(const std::vector<double>& cost) {
    cost_ = cost;
    d_ = cost;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  void pivot(std::size_t r, std::size_t enter) {
    double* prow = &t_[r * cols_];
    const double piv = prow[enter];
    if (std::abs(piv) < 1e-14) {
      throw NumericalError("simplex pivot element vanished", iterations_, piv);
    }
    const double inv = 1.0 / piv;
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    prow[enter] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * cols_];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    const double fd = d_[enter];
    if (fd != 0.0) {
      for (std::size_t j : nz_) d_[j] -= fd * prow[j];
      d_[enter] = 0.0;
    }
    const std::size_t leave = basis_[r];
    pos_[leave] = -1;
    basis_[r] = enter;
    pos_[enter] = static_cast<int>(r);
  }

  PhaseOutcome run() {
    const double tol = opts_.feasibility_tol;
    while (true) {
      if (iterations_ >= opts_.max_iterations) {
        throw NumericalError("simplex iteration limit reached", iterations_, 0.0);
      }
      // Pricing.
      std::size_t enter = cols_;
      double best = 0.0;
      int dir = 0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
        const double dj = d_[j];
        int candidate = 0;
        if (dj < -opts_.optimality_tol && x_[j] < up_[j] - tol) candidate = 1;
        if (dj > opts_.optimality_tol && x_[j] > lo_[j] + tol) candidate = -1;
        if (candidate == 0) continue;
        if (bland_) {
          enter = j;
          dir = candidate;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          enter = j;
          dir = candidate;
        }
      }
      if (enter == cols_) return PhaseOutcome::Optimal;

      // Ratio test. Bland mode keeps the lowest-index rule for anti-cycling;
      // otherwise a Harris two-pass test picks the largest pivot among rows
      // whose ratio is within the feasibility tolerance of the minimum, which
      // keeps tiny pivots (and the blow-up they cause) out of the tableau.
      auto ratio_of = [&](std::size_t i, double alpha, double slack_tol) {
        const std::size_t b = basis_[i];
        if (alpha > 0.0) return std::isfinite(lo_[b]) ? (x_[b] - lo_[b] + slack_tol) / alpha : kInf;
        return std::isfinite(up_[b]) ? (up_[b] - x_[b] + slack_tol) / -alpha : kInf;
      };
      std::size_t leave_row = m_;
      double step = kInf;
      double leave_alpha = 0.0;
      if (bland_) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double alpha = t_[i * cols_ + enter] * dir;
          if (std::abs(alpha) <= kPivotTol) continue;
          const double ratio = std::max(0.0, ratio_of(i, alpha, 0.0));
          if (!std::isfinite(ratio)) continue;
          bool take = ratio < step - 1e-12;
          if (!take && ratio <= step + 1e-12 && leave_row < m_) take = basis_[i] < basis_[leave_row];
          if (take) {
            step = ratio;
            leave_row = i;
            leave_alpha = alpha;
          }
        }
      } else {
        double bound = kInf;
        for (std::size_t i = 0; i < m_; ++i) {
          const double alpha = t_[i * cols_ + enter] * dir;
          if (std::abs(alpha) <= kPivotTol) continue;
          bound = std::min(bound, ratio_of(i, alpha, tol));
        }
        if (std::isfinite(bound)) {
          for (std::size_t i = 0; i < m_; ++i) {
            const double alpha = t_[i * cols_ + enter] * dir;
            if (std::abs(alpha) <= kPivotTol) continue;
            const double ratio = ratio_of(i, alpha, 0.0);
            if (ratio > bound) continue;
            if (leave_row == m_ || std::abs(alpha) > std::abs(leave_alpha)) {
              leave_row = i;
              leave_alpha = alpha;
              step = std::max(0.0, ratio);
            }
          }
        }
      }
      const double flip = up_[enter] - lo_[enter];
      ++iterations_;
      if (!std::isfinite(step) && !std::isfinite(flip)) return PhaseOutcome::Unbounded;

      if (flip <= step) {
        // Bound flip, no basis change.
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = t_[i * cols_ + enter];
          if (a != 0.0) x_[basis_[i]] -= a * dir * flip;
        }
        x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
        degenerate_run_ = 0;
        continue;
      }

      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t_[i * cols_ + enter];
        if (a != 0.0) x_[basis_[i]] -= a * dir * step;
      }
      x_[enter] += dir * step;
      const std::size_t leave = basis_[leave_row];
      x_[leave] = leave_alpha > 0.0 ? lo_[leave] : up_[leave];
      pivot(leave_row, enter);

      if (step <= kDegenerateStep) {
        if (++degenerate_run_ >= opts_.stall_limit) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
    }
  }

  const MilpModel& model_;
  const LpOptions& opts_;
  std::size_t n_;
  std::size_t m_;
  std::size_t art_begin_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
  std::vector<double> t_;
  std::vector<double> lo_, up_, x_;
  std::vector<double> cost_, d_;
  std::vector<std::size_t> basis_;
  std::vector<int> pos_;
  std::vector<double> art_sigma_;
  std::vector<std::size_t> art_row_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_run_ = 0;
  bool textbook_ = false;  // lowest-index pricing and ratio test throughout
  bool bland_ = false;
};

}  // namespace

Solution solve_lp(const MilpModel& m, std::span<const double> lower, std::span<const double> upper,
                  const LpOptions& opts) {
  m.validate();
  if (lower.size() != m.variable_count() || upper.size() != m.variable_count())
    throw DimensionError("solve_lp: bound override has wrong length");
  Solution sol;
  for (std::size_t j = 0; j < m.variable_count(); ++j) {
    if (lower[j] > upper[j] + 1e-12) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  // The Harris test keeps each step within tolerance, but the dense tableau
  // drifts over long runs and the refactorized point can then miss a row by
  // more than the tolerance. One re-solve with the textbook ratio test is
  // cheaper than periodic reinversion and has repaired every case seen.
  for (const bool textbook : {false, true}) {
    Tableau tab(m, lower, upper, opts, textbook);
    const auto p1 = tab.phase_one();
    (void)p1;  // phase one is bounded below by zero
    if (tab.infeasibility() > 1e-7) {
      sol.iterations += tab.iterations();
      if (!textbook) continue;  // Harris phase one can stall on drifted prices
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
    tab.retire_artificials();
    const auto p2 = tab.phase_two();
    sol.iterations += tab.iterations();
    if (p2 == PhaseOutcome::Unbounded) {
      sol.status = SolveStatus::Unbounded;
      sol.objective = -kInf;
      return sol;
    }
    sol.values = tab.solution();
    double viol = m.max_violation(sol.values);
    if (viol > 1e-9) {
      sol.values = tab.refined_solution();
      viol = m.max_violation(sol.values);
    }
    if (viol <= 1e-7) break;
    if (textbook)
      throw NumericalError("simplex final point violates the model by " + std::to_string(viol),
                           tab.iterations(), viol);
  }
  sol.status = SolveStatus::Optimal;
  sol.objective = m.objective_value(sol.values);
  sol.best_bound = sol.objective;
  return sol;
}

Solution solve_lp(const MilpModel& m, const LpOptions& opts) {
  std::vector<double> lo(m.variable_count()), up(m.variable_count());
  for (std::size_t j = 0; j < m.variable_count(); ++j) {
    lo[j] = m.variables()[j].lower;
    up[j] = m.variables()[j].upper;
  }
  return solve_lp(m, lo, up, opts);
}

}  // namespace sccuc
