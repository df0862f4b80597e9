#pragma once

#include <vector>

#include "vocbf/config.hpp"
#include "vocbf/geometry.hpp"
#include "vocbf/qp_solver.hpp"
#include "vocbf/world.hpp"

namespace vocbf {

/// Desired velocity for the integrator: P (goal - p), saturated at the preferred speed.
Vec2 desired_velocity(const AgentState & agent, const ScenarioConfig & cfg);

/**
 * PD reference. Integrator: Cartesian acceleration P (v_des - v), clipped to
 * u_max. Car: (tan(phi), a) steering toward the goal bearing and tracking a
 * speed proportional to the remaining distance, box-clipped.
 */
Vec2 reference_control(const AgentState & agent, const ScenarioConfig & cfg);

/// Maps the agent's control to its Cartesian acceleration (identity for the integrator).
Mat2 input_map(const AgentState & agent, const ScenarioConfig & cfg);

/// Input-set rows over the 2 control components: inscribed polygon or steering/accel box.
std::vector<LinearConstraintRow> input_set_rows(const ScenarioConfig & cfg);

enum class QpMode {
  relaxed,  ///< slack-relaxed cone rows in the objective plus hard braking rows
  hard_vo,  ///< cone rows as hard constraints, no slacks, no braking rows
};

struct SlackInfo
{
  int neighbor{0};
  Eigen::Index column{0};
  double weight{0.0};
};

struct AssembledQp
{
  QpProblem problem;
  Vec2 u_ref{Vec2::Zero()};
  Mat2 input_map{Mat2::Identity()};
  std::vector<SlackInfo> slacks;
  int n_vo_rows{0};
  int n_safety_rows{0};
  int n_input_rows{0};
};

/**
 * @brief Per-agent QP over [u; lambda_1..lambda_k].
 *
 * Objective k_u |u - u_ref|^2 + k_vo sum_j w_j lambda_j^2, one cone row
 * hdot_vo + alpha_vo h_vo >= lambda_j for each neighbor with a predicted
 * collision (w_j > 0), one braking row per closing neighbor and the input set.
 */
AssembledQp assemble_qp(int agent_index, const World & world, const ScenarioConfig & cfg,
                        QpMode mode = QpMode::relaxed);

/// Cost on the common violation of the braking rows when they cannot all hold.
inline constexpr double kSafetyViolationWeight = 1e6;

/**
 * @brief Adds one nonnegative column shared by every braking row.
 *
 * The result is always feasible; with a large weight its minimizer is the
 * control that violates the worst braking row the least.
 */
AssembledQp soften_safety_rows(const AssembledQp & qp, double weight);

struct ControlOutput
{
  Vec2 u{Vec2::Zero()};
  QpStatus status{QpStatus::optimal};
  bool fallback{false};
  int n_slacks{0};
  double max_slack_residual{0.0};  ///< scaled |lambda* - min(0, hdot_vo(u*) + alpha h_vo)|
  int qp_iterations{0};
};

/// Full braking against the current velocity within the input set; also holds goal-reached agents at rest.
Vec2 braking_control(const AgentState & agent, const ScenarioConfig & cfg);

/// Proposed controller: solves the relaxed QP, falls back to braking on solver failure.
ControlOutput compute_control(int agent_index, const World & world, const ScenarioConfig & cfg);

/**
 * Largest scaled slack-optimality residual of a solution, recomputed from the
 * snapshot geometry rather than from the assembled rows.
 */
double max_slack_residual(const AssembledQp & qp, const QpSolution & sol, int agent_index, const World & world,
                          const ScenarioConfig & cfg);

}  // namespace vocbf
