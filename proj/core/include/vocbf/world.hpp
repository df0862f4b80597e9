#pragma once

#include <vector>

#include "vocbf/config.hpp"
#include "vocbf/dynamics.hpp"
#include "vocbf/geometry.hpp"

namespace vocbf {

/**
 * @brief One agent at an instant.
 *
 * velocity is always the Cartesian velocity; for cars it equals
 * speed * (cos(theta), sin(theta)) and theta/speed carry the car state.
 */
struct AgentState
{
  int id{0};
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
  double theta{0.0};
  double speed{0.0};
  double radius{0.5};
  Vec2 goal{Vec2::Zero()};
  bool reached{false};

  DiscState disc() const { return {position, velocity, radius}; }
  CarState car() const { return {position, theta, speed}; }
  IntegratorState integrator() const { return {position, velocity}; }
};

/// Immutable-by-convention snapshot all agents' controls are computed from.
struct World
{
  double t{0.0};
  std::vector<AgentState> agents;
};

}  // namespace vocbf
