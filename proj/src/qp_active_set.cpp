// Goldfarb–Idnani dual active-set method for strictly convex QPs.
//
// Work happens in the whitened space y = Lᵀx (G = LLᵀ), where the objective is
// ½‖y‖² + ĝᵀy and a normal c becomes ĉ = L⁻¹c. The step directions come from
// a QR factorization of the whitened active normals N̂ = Q₁R:
//   z = (I − Q₁Q₁ᵀ) ĉ_p,   r = R⁻¹Q₁ᵀ ĉ_p.
// Forming G⁻¹ and NᵀG⁻¹N explicitly squares the conditioning, which loses the
// step entirely when G is only regularized (rank-deficient least squares).
// Problem sizes are a few dozen variables, so the QR is rebuilt every step.

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>

#include "sccuc/milp.hpp"

namespace sccuc {

QpResult solve_qp_active_set(const RMatrix& hessian, std::span<const double> linear,
                             const RMatrix& a, std::span<const double> b, const QpOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t n = linear.size();
  const std::size_t m = b.size();
  if (hessian.rows() != n || hessian.cols() != n)
    throw DimensionError("QP Hessian does not match the linear term");
  if (a.rows() != m || (m > 0 && a.cols() != n))
    throw DimensionError("QP constraint matrix has wrong shape");

  const auto ni = static_cast<Eigen::Index>(n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, hessian(i, i));
  MatrixXd g(ni, ni);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) g(Eigen::Index(i), Eigen::Index(k)) = hessian(i, k);
  g.diagonal().array() += opts.regularization * scale;
  const Eigen::LLT<MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw NumericalError("QP Hessian is not positive semidefinite", 0, 0.0);
  const auto L = llt.matrixL();
  const auto LT = llt.matrixU();

  // GI works with c_iᵀx ≥ d_i; here c_i = −a_i and d_i = −b_i.
  MatrixXd chat(ni, static_cast<Eigen::Index>(m));  // whitened normals
  for (std::size_t i = 0; i < m; ++i) {
    VectorXd c(ni);
    for (std::size_t k = 0; k < n; ++k) c(Eigen::Index(k)) = -a(i, k);
    chat.col(Eigen::Index(i)) = L.solve(c);
  }
  auto slack = [&](std::size_t i, const VectorXd& x) {
    double s = b[i];
    for (std::size_t k = 0; k < n; ++k) s -= a(i, k) * x(Eigen::Index(k));
    return s;
  };

  VectorXd lin(ni);
  for (std::size_t i = 0; i < n; ++i) lin(Eigen::Index(i)) = linear[i];
  VectorXd x = -llt.solve(lin);

  QpResult res;
  std::vector<std::size_t> active;
  std::vector<double> u;  // multipliers of active rows
  std::vector<bool> in_active(m, false);

  auto finish = [&](QpStatus status) {
    res.status = status;
    res.x.assign(x.data(), x.data() + n);
    res.multipliers.assign(m, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) res.multipliers[active[k]] = u[k];
    res.active = active;
    double obj = lin.dot(x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) obj += 0.5 * x(Eigen::Index(i)) * hessian(i, k) * x(Eigen::Index(k));
    res.objective = obj;
    return res;
  };

  auto drop_row = [&](std::size_t k) {
    in_active[active[k]] = false;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(k));
    u.erase(u.begin() + static_cast<std::ptrdiff_t>(k));
  };

  while (true) {
    std::size_t p = m;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_active[i]) continue;
      const double s = slack(i, x);
      const double tol = opts.feasibility_tol * std::max(1.0, std::abs(b[i]));
      if (s < -tol && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p == m) return finish(QpStatus::Optimal);

    const VectorXd np = chat.col(Eigen::Index(p));
    const double np_norm = np.norm();
    double up = 0.0;  // multiplier of the row being added

    while (true) {
      if (++res.iterations > opts.max_iterations)
        throw NumericalError("active-set QP iteration limit reached", res.iterations, 0.0);
      const std::size_t q = active.size();
      const auto qi = static_cast<Eigen::Index>(q);
      VectorXd zy = np;
      VectorXd r(qi);
      if (q > 0) {
        MatrixXd na(ni, qi);
        for (std::size_t k = 0; k < q; ++k) na.col(Eigen::Index(k)) = chat.col(Eigen::Index(active[k]));
        const Eigen::HouseholderQR<MatrixXd> qr(na);
        const MatrixXd q1 = qr.householderQ() * MatrixXd::Identity(ni, qi);
        const MatrixXd rr = qr.matrixQR().topRows(qi).triangularView<Eigen::Upper>();
        const double rmax = rr.diagonal().cwiseAbs().maxCoeff();
        if (rr.diagonal().cwiseAbs().minCoeff() <= 1e-12 * std::max(rmax, 1e-300))
          throw NumericalError("active-set QP: dependent active constraints", res.iterations, 0.0);
        const VectorXd proj = q1.transpose() * np;
        r = rr.triangularView<Eigen::Upper>().solve(proj);
        zy = np - q1 * proj;
      }

      // Partial (dual) step limit.
      double t1 = kInf;
      std::size_t drop = q;
      for (std::size_t k = 0; k < q; ++k) {
        if (r(Eigen::Index(k)) > 1e-12) {
          const double ratio = u[k] / r(Eigen::Index(k));
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      // Full (primal) step.
      const bool z_zero = zy.norm() <= 1e-10 * std::max(np_norm, 1e-300);
      double t2 = kInf;
      if (!z_zero) {
        // slack(p) = −(ĉ_pᵀy − d_p), so the full step closes it exactly.
        const double curvature = zy.dot(np);
        if (curvature > 0.0) t2 = std::max(0.0, -slack(p, x)) / curvature;
      }

      if (!std::isfinite(t1) && !std::isfinite(t2)) return finish(QpStatus::Infeasible);

      if (!std::isfinite(t2)) {
        for (std::size_t k = 0; k < q; ++k) u[k] -= t1 * r(Eigen::Index(k));
        up += t1;
        drop_row(drop);
        continue;
      }

      const double t = std::min(t1, t2);
      x += t * LT.solve(zy);
      for (std::size_t k = 0; k < q; ++k) u[k] -= t * r(Eigen::Index(k));
      up += t;

      if (t2 <= t1) {
        active.push_back(p);
        u.push_back(up);
        in_active[p] = true;
        break;
      }
      drop_row(drop);
    }
  }
}

}  // namespace sccuc
