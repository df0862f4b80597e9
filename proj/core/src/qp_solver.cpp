#include "vocbf/qp_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vocbf {

const char * to_string(QpStatus s)
{
  switch (s) {
  case QpStatus::optimal: return "optimal";
  case QpStatus::infeasible: return "infeasible";
  case QpStatus::failed: return "failed";
  }
  return "unknown";
}

double KktReport::residual() const
{
  return std::max({stationarity, complementarity, dual_infeasibility});
}

KktReport kkt_report(const QpProblem & problem, const Eigen::VectorXd & x, const Eigen::VectorXd & multipliers)
{
  KktReport rep;
  const Eigen::VectorXd hx = problem.H * x;
  Eigen::VectorXd grad = hx + problem.f;
  Eigen::VectorXd pull = Eigen::VectorXd::Zero(x.size());
  double scale = 1.0 + std::max(hx.lpNorm<Eigen::Infinity>(), problem.f.lpNorm<Eigen::Infinity>());
  for (std::size_t k = 0; k < problem.rows.size(); ++k) {
    const auto & row = problem.rows[k];
    const double u = multipliers(static_cast<Eigen::Index>(k));
    pull += u * row.a;
    const double s = row.slack(x);
    const double row_scale = 1.0 + std::abs(row.b) + row.a.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>();
    rep.primal_violation = std::max(rep.primal_violation, -s);
    rep.dual_infeasibility = std::max(rep.dual_infeasibility, -u);
    rep.complementarity = std::max(rep.complementarity, std::abs(u * s) / (scale * row_scale));
  }
  scale = std::max(scale, 1.0 + pull.lpNorm<Eigen::Infinity>());
  rep.stationarity = (grad - pull).lpNorm<Eigen::Infinity>() / scale;
  rep.primal_violation = std::max(0.0, rep.primal_violation);
  return rep;
}

namespace {

struct ActiveSetFactor
{
  Eigen::MatrixXd J1;  // spans the range of G^-1 N
  Eigen::MatrixXd J2;  // null-space directions, J J' = G^-1
  Eigen::MatrixXd R;   // upper triangular, L^-1 N = Q [R; 0]
};

ActiveSetFactor factor_active(const Eigen::MatrixXd & l_inv, const std::vector<int> & active,
                              const std::vector<LinearConstraintRow> & rows)
{
  const Eigen::Index n = l_inv.rows();
  const auto q = static_cast<Eigen::Index>(active.size());
  ActiveSetFactor out;
  if (q == 0) {
    out.J1.resize(n, 0);
    out.J2 = l_inv.transpose();
    out.R.resize(0, 0);
    return out;
  }
  Eigen::MatrixXd B(n, q);
  for (Eigen::Index c = 0; c < q; ++c) { B.col(c) = l_inv * rows[active[c]].a; }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd J = l_inv.transpose() * Q;
  out.J1 = J.leftCols(q);
  out.J2 = J.rightCols(n - q);
  out.R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
  return out;
}

double row_scale(const LinearConstraintRow & row, const Eigen::VectorXd & x)
{
  return 1.0 + std::abs(row.b) + row.a.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>();
}

// Equality-constrained solve on the final working set to remove drift from
// the incremental updates.
bool polish(const QpProblem & problem, const std::vector<int> & active, Eigen::VectorXd & x, Eigen::VectorXd & u_active)
{
  const Eigen::Index n = problem.dim();
  const auto q = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + q, n + q);
  Eigen::VectorXd rhs(n + q);
  K.topLeftCorner(n, n) = problem.H;
  rhs.head(n) = -problem.f;
  for (Eigen::Index c = 0; c < q; ++c) {
    const auto & row = problem.rows[active[c]];
    K.block(0, n + c, n, 1) = -row.a;
    K.block(n + c, 0, 1, n) = row.a.transpose();
    rhs(n + c) = row.b;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible()) { return false; }
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) { return false; }
  x = sol.head(n);
  u_active = sol.tail(q);
  return true;
}

}  // namespace

QpSolution solve_qp(const QpProblem & problem, const QpSolverSettings & settings)
{
  const Eigen::Index n = problem.dim();
  const auto m = static_cast<int>(problem.rows.size());
  QpSolution sol;
  sol.multipliers = Eigen::VectorXd::Zero(m);

  if (problem.H.rows() != n || problem.H.cols() != n) {
    sol.status = QpStatus::failed;
    sol.x = Eigen::VectorXd::Zero(n);
    return sol;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(problem.H);
  if (llt.info() != Eigen::Success) {
    sol.status = QpStatus::failed;
    sol.x = Eigen::VectorXd::Zero(n);
    return sol;
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd l_inv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::VectorXd x = -llt.solve(problem.f);
  std::vector<int> active;
  std::vector<double> u;  // multipliers of active rows, same order
  std::vector<char> is_active(m, 0);

  const int max_iter = settings.max_iterations > 0 ? settings.max_iterations : 50 * (static_cast<int>(n) + m) + 100;
  const double violation_tol = 1e-3 * settings.tol_feas;
  int iter = 0;

  auto finish = [&](QpStatus status) {
    sol.status = status;
    sol.iterations = iter;
    if (status == QpStatus::optimal) {
      Eigen::VectorXd x_pol = x;
      Eigen::VectorXd u_pol;
      if (polish(problem, active, x_pol, u_pol) && (u_pol.array() >= -settings.tol_kkt).all()) {
        Eigen::VectorXd mult_pol = Eigen::VectorXd::Zero(m);
        for (std::size_t c = 0; c < active.size(); ++c) { mult_pol(active[c]) = std::max(0.0, u_pol(c)); }
        Eigen::VectorXd mult = Eigen::VectorXd::Zero(m);
        for (std::size_t c = 0; c < active.size(); ++c) { mult(active[c]) = u[c]; }
        const auto rep_pol = kkt_report(problem, x_pol, mult_pol);
        const auto rep = kkt_report(problem, x, mult);
        if (std::max(rep_pol.residual(), rep_pol.primal_violation) <= std::max(rep.residual(), rep.primal_violation)) {
          x = x_pol;
          for (std::size_t c = 0; c < active.size(); ++c) { u[c] = mult_pol(active[c]); }
        }
      }
    }
    sol.x = x;
    sol.multipliers.setZero();
    for (std::size_t c = 0; c < active.size(); ++c) { sol.multipliers(active[c]) = u[c]; }
    sol.objective = problem.objective(x);
    const auto rep = kkt_report(problem, x, sol.multipliers);
    sol.kkt_residual = rep.residual();
    sol.max_violation = rep.primal_violation;
    if (sol.status == QpStatus::optimal && (sol.max_violation > settings.tol_feas || sol.kkt_residual > settings.tol_kkt)) {
      sol.status = QpStatus::failed;
    }
    return sol;
  };

  while (true) {
    // most violated row, by normalized violation
    int p = -1;
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
      if (is_active[k]) { continue; }
      const auto & row = problem.rows[k];
      const double s = row.slack(x);
      if (s >= -violation_tol * row_scale(row, x)) { continue; }
      const double a_norm = row.a.norm();
      if (a_norm == 0.0) { return finish(QpStatus::infeasible); }
      const double score = s / a_norm;
      if (score < worst) {
        worst = score;
        p = k;
      }
    }
    if (p < 0) { return finish(QpStatus::optimal); }

    const auto & row_p = problem.rows[p];
    double u_p = 0.0;
    bool added = false;
    while (!added) {
      if (++iter > max_iter) { return finish(QpStatus::failed); }

      const auto fac = factor_active(l_inv, active, problem.rows);
      const auto q = static_cast<Eigen::Index>(active.size());
      const Eigen::VectorXd d1 = fac.J1.transpose() * row_p.a;
      const Eigen::VectorXd d2 = fac.J2.transpose() * row_p.a;
      const Eigen::VectorXd z = fac.J2 * d2;
      Eigen::VectorXd r(q);
      if (q > 0) { r = fac.R.triangularView<Eigen::Upper>().solve(d1); }

      // largest dual step keeping active multipliers nonnegative
      double t1 = kInf;
      int drop = -1;
      for (Eigen::Index c = 0; c < q; ++c) {
        if (r(c) > 0.0) {
          const double ratio = u[c] / r(c);
          if (ratio < t1) {
            t1 = ratio;
            drop = static_cast<int>(c);
          }
        }
      }

      // full primal step onto row p
      const double zc = d2.squaredNorm();
      const double dep_tol = 1e-12 * (d1.squaredNorm() + zc);
      double t2 = kInf;
      if (zc > dep_tol) { t2 = -row_p.slack(x) / zc; }

      const double t = std::min(t1, t2);
      if (std::isinf(t)) { return finish(QpStatus::infeasible); }

      if (std::isinf(t2)) {
        for (Eigen::Index c = 0; c < q; ++c) { u[c] -= t * r(c); }
        u_p += t;
        is_active[active[drop]] = 0;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
        continue;
      }

      x += t * z;
      for (Eigen::Index c = 0; c < q; ++c) { u[c] -= t * r(c); }
      u_p += t;

      if (t2 <= t1) {
        active.push_back(p);
        u.push_back(u_p);
        is_active[p] = 1;
        added = true;
      } else {
        is_active[active[drop]] = 0;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
      }
    }
  }
}

}  // namespace vocbf
