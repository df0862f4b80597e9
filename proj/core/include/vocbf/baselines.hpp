#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vocbf/config.hpp"
#include "vocbf/controller.hpp"
#include "vocbf/world.hpp"

namespace vocbf {

using Rng = std::mt19937_64;

/// Per-agent random stream derived from the episode seed.
Rng make_agent_rng(std::uint64_t seed, int agent_id);

struct VelocitySample
{
  Vec2 v{Vec2::Zero()};
  double penalty{0.0};
};

/**
 * Sample 0 is the current velocity; the rest are uniform over the disc of
 * velocities reachable within one step (radius u_max * dt), norm-clamped to v_max.
 */
std::vector<VelocitySample> sample_admissible(const Vec2 & v_current, double u_max, double dt, double v_max, int n,
                                              Rng & rng);

enum class ObstacleModel { vo, rvo };

/**
 * 1 / T_col + |v - v_des| with T_col the soonest collision over all obstacles.
 * VO tests the ray v - v_B, RVO the ray 2 v - v_A - v_B. The inverse
 * time-to-collision uses vo_weight, so contact saturates at w_max.
 */
double vo_rvo_penalty(const Vec2 & v, const DiscState & self, std::span<const DiscState> obstacles, const Vec2 & v_des,
                      ObstacleModel model, double w_max = kMaxVoWeight);

/// Floor applied to clearance and pass time so the OVVO penalty stays finite.
inline constexpr double kOvvoFloor = 1e-3;

struct OvvoTerms
{
  double clearance{0.0};  ///< surface gap at closest approach, 0 on a collision course
  double pass_time{0.0};  ///< time of closest approach
};

/// Clearance and pass time of candidate v against one obstacle; nullopt when not approaching.
std::optional<OvvoTerms> ovvo_terms(const Vec2 & v, const DiscState & self, const DiscState & obstacle);

/// k_tp d_v^-c1 t_p^-c2, with both factors floored at kOvvoFloor.
double ovvo_obstacle_cost(const OvvoTerms & t, const ScenarioConfig & cfg);

/// Sum of obstacle costs over approaching obstacles plus k_vd |v - v_des|.
double ovvo_penalty(const Vec2 & v, const DiscState & self, std::span<const DiscState> obstacles, const Vec2 & v_des,
                    const ScenarioConfig & cfg);

struct HvoResult
{
  Vec2 u{Vec2::Zero()};
  bool feasible{true};
  QpStatus status{QpStatus::optimal};
};

/// Strict cone-constraint QP. An infeasible problem yields zero acceleration and feasible = false.
HvoResult hvo_control(int agent_index, const World & world, const ScenarioConfig & cfg);

/**
 * Sampling baselines (vo, rvo, ovvo): pick the lowest-penalty sample, ties to
 * the lowest index, and return (v_selected - v) / dt clipped to u_max.
 */
Vec2 select_velocity(int agent_index, const World & world, ControllerKind kind, const ScenarioConfig & cfg, Rng & rng);

}  // namespace vocbf
