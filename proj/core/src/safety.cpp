#include "vocbf/safety.hpp"

#include <algorithm>
#include <stdexcept>

namespace vocbf {

SphereDistance sphere_distance(const Vec2 & p_i, const Vec2 & p_j, double r_i, double r_j)
{
  const Vec2 diff = p_j - p_i;
  const double n = diff.norm();
  if (!(n > 0.0)) { throw DegeneratePairError("agent centers coincide"); }
  return {n - r_i - r_j, diff / n};
}

SafetyCbfValue h_c(double d, const Vec2 & v_rel, const Vec2 & p_hat, double delta, double u_max)
{
  if (!(u_max > 0.0)) { throw std::invalid_argument("u_max must be positive"); }
  if (!(delta >= 0.0)) { throw std::invalid_argument("delta must be nonnegative"); }
  const double closing = v_rel.dot(p_hat);
  SafetyCbfValue out;
  out.nu = std::min(0.0, closing);
  out.h = d - delta - out.nu * out.nu / (2.0 * u_max);
  out.active = closing <= 0.0;
  return out;
}

SafetyCbfValue pair_h_c(const DiscState & agent, const DiscState & obstacle, double delta, double u_max)
{
  const auto sd = sphere_distance(agent.position, obstacle.position, agent.radius, obstacle.radius);
  return h_c(sd.d, obstacle.velocity - agent.velocity, sd.p_hat, delta, u_max);
}

std::optional<LinearConstraintRow> safety_constraint_row(
  const DiscState & agent, const DiscState & obstacle, const SafetyParams & params)
{
  const Vec2 p = obstacle.position - agent.position;
  const Vec2 v = obstacle.velocity - agent.velocity;
  const auto sd = sphere_distance(agent.position, obstacle.position, agent.radius, obstacle.radius);
  const auto value = h_c(sd.d, v, sd.p_hat, params.delta, params.u_max);
  // at zero closing speed the derivative does not depend on u
  if (!(value.nu < 0.0)) { return std::nullopt; }

  const double d_dot = v.dot(sd.p_hat);
  const Vec2 p_hat_dot = (v - d_dot * sd.p_hat) / p.norm();
  const double k = value.nu / params.u_max;

  // hdot = d_dot - k (u_rel . p_hat + v . p_hat_dot), u_rel = -u_i
  LinearConstraintRow row;
  row.a = k * sd.p_hat;
  row.b = params.share * (-d_dot + k * v.dot(p_hat_dot) - params.alpha_c * value.h);
  // never ask for more than full braking away from j
  row.b = std::min(row.b, row.a.norm() * params.u_max);
  return row;
}

}  // namespace vocbf
