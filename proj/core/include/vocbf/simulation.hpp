#pragma once

#include <span>
#include <vector>

#include "vocbf/baselines.hpp"
#include "vocbf/config.hpp"
#include "vocbf/world.hpp"

namespace vocbf {

/// One agent at one recorded instant. For cars u holds (tan(phi), a).
struct TraceRow
{
  double t{0.0};
  int agent_id{0};
  Vec2 p{Vec2::Zero()};
  Vec2 v{Vec2::Zero()};
  Vec2 u{Vec2::Zero()};
  double theta{0.0};
  double speed{0.0};
  bool has_car_state{false};
  double min_h_c{kInf};
  double min_h_vo{kInf};
};

struct EpisodeResult
{
  ScenarioConfig config;
  std::vector<TraceRow> trace;
  int collisions{0};
  std::vector<char> success;          ///< per agent
  std::vector<double> arrival_time;   ///< per agent, NaN if never reached
  bool all_succeeded{false};
  double completion_time{0.0};        ///< last first-arrival, or the end time on failure
  double end_time{0.0};
  bool terminated_early{false};
  std::vector<double> solve_times_ms; ///< per step, mean controller time per agent
  int infeasible_steps{0};            ///< agent-steps where the QP had no solution
  int fallback_steps{0};
  double min_h_c{kInf};
  long qp_solves{0};
  long slack_checks{0};
  double max_slack_residual{0.0};
  double max_abs_control_x{0.0};      ///< over applied controls
  double max_abs_control_y{0.0};

  double mean_solve_ms() const;
};

/// Circle formation: agents evenly spaced, perturbed by clipped Gaussian noise, goals antipodal.
World make_circle_scenario(const ScenarioConfig & cfg);

struct AgentStepInfo
{
  Vec2 u{Vec2::Zero()};
  bool infeasible{false};
  bool fallback{false};
  bool solved_qp{false};
  int n_slacks{0};
  double slack_residual{0.0};
  double solve_ms{0.0};
};

struct StepResult
{
  World world;
  std::vector<AgentStepInfo> info;
};

/**
 * @brief Advances every agent by one timestep.
 *
 * All controls are computed from the same snapshot before any state is
 * integrated; `order` only changes the processing sequence. rngs holds one
 * stream per agent (used by the sampling baselines).
 */
StepResult step_world(const World & world, const ScenarioConfig & cfg, std::vector<Rng> & rngs,
                      std::span<const int> order = {});

/// Number of downward crossings of `threshold` by a distance series.
int count_downward_crossings(std::span<const double> distances, double threshold);

/**
 * Collision events in a trace: a pair counts each time its center distance
 * drops below (1 - tolerance) (r_i + r_j) from above.
 */
int detect_collision_events(std::span<const TraceRow> trace, double agent_radius, double geometric_tolerance);

/// Runs one episode to completion, t_end, or hVO termination.
EpisodeResult run_episode(const ScenarioConfig & cfg);

struct MeanStd
{
  double mean{0.0};
  double std{0.0};
};

MeanStd mean_std(std::span<const double> xs);

struct AggregateStats
{
  int runs{0};
  double success_rate{0.0};
  MeanStd collisions;
  MeanStd completion_time;
  MeanStd solve_ms;
};

AggregateStats aggregate(std::span<const EpisodeResult> results);

}  // namespace vocbf
