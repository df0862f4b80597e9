#pragma once

#include <Eigen/Core>

#include <vector>

#include "vocbf/safety.hpp"

namespace vocbf {

/**
 * @brief Dense convex QP
 *
 *   min  0.5 x' H x + f' x
 *   s.t. a_k' x >= b_k  for every row k
 */
struct QpProblem
{
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  std::vector<LinearConstraintRow> rows;

  Eigen::Index dim() const { return f.size(); }
  double objective(const Eigen::VectorXd & x) const { return 0.5 * x.dot(H * x) + f.dot(x); }
};

enum class QpStatus { optimal, infeasible, failed };

const char * to_string(QpStatus s);

struct QpSolution
{
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  ///< one per row, zero for inactive rows
  double objective{0.0};
  QpStatus status{QpStatus::failed};
  double kkt_residual{0.0};     ///< max of scaled stationarity, complementarity, dual infeasibility
  double max_violation{0.0};    ///< max_k (b_k - a_k' x)^+
  int iterations{0};

  bool ok() const { return status == QpStatus::optimal; }
};

struct QpSolverSettings
{
  double tol_feas{1e-8};
  double tol_kkt{1e-7};
  int max_iterations{0};  ///< 0 selects a bound from the problem size
};

/**
 * Goldfarb-Idnani dual active-set method. Requires H positive definite.
 * Starts from the unconstrained minimizer and adds violated rows one at a
 * time, so infeasibility is detected when no step can reduce a violation.
 */
QpSolution solve_qp(const QpProblem & problem, const QpSolverSettings & settings = {});

/// Scaled KKT residual and primal violation of a candidate primal-dual pair.
struct KktReport
{
  double stationarity{0.0};
  double complementarity{0.0};
  double dual_infeasibility{0.0};
  double primal_violation{0.0};

  double residual() const;
};

KktReport kkt_report(const QpProblem & problem, const Eigen::VectorXd & x, const Eigen::VectorXd & multipliers);

}  // namespace vocbf
