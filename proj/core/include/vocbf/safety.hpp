#pragma once

#include <Eigen/Core>

#include <optional>

#include "vocbf/geometry.hpp"

namespace vocbf {

/// Braking-distance barrier value for one pair.
struct SafetyCbfValue
{
  double h{0.0};
  double nu{0.0};       ///< min(0, v_rel . p_hat), the closing speed
  bool active{false};   ///< true when the barrier derivative depends on the control
};

/// Linear inequality a . x >= b over a QP's decision vector.
struct LinearConstraintRow
{
  Eigen::VectorXd a;
  double b{0.0};

  double slack(const Eigen::VectorXd & x) const { return a.dot(x) - b; }
  bool satisfied(const Eigen::VectorXd & x, double tol) const { return slack(x) >= -tol; }
};

struct SphereDistance
{
  double d{0.0};          ///< surface-to-surface distance, negative in overlap
  Vec2 p_hat{Vec2::Zero()};  ///< unit vector from i toward j
};

SphereDistance sphere_distance(const Vec2 & p_i, const Vec2 & p_j, double r_i, double r_j);

SafetyCbfValue h_c(double d, const Vec2 & v_rel, const Vec2 & p_hat, double delta, double u_max);

struct SafetyParams
{
  double alpha_c{10.0};  ///< slope of the linear class-K function
  double u_max{1.0};     ///< braking acceleration budget
  double delta{0.05};    ///< safety margin [m]
  double share{1.0};     ///< fraction of the zero-control margin this agent may consume
};

/**
 * @brief Barrier row over agent i's Cartesian acceleration (2 coefficients).
 *
 * Encodes hdot_c + alpha_c h_c >= 0 with j assumed unaccelerated, so the
 * relative acceleration is -u_i. Returns nullopt when the pair is receding,
 * where the inequality holds for every control,
 * and when the closing speed is exactly zero, where it does not involve u_i.
 *
 * With share < 1 the row only lets u_i consume that fraction of the
 * zero-control value hdot_c(0) + alpha_c h_c: two agents each holding their
 * half keep the true relative barrier rate nonnegative whatever the other does
 * within its own row.
 */
std::optional<LinearConstraintRow> safety_constraint_row(
  const DiscState & agent, const DiscState & obstacle, const SafetyParams & params);

/// h_c evaluated directly from two bodies.
SafetyCbfValue pair_h_c(const DiscState & agent, const DiscState & obstacle, double delta, double u_max);

}  // namespace vocbf
