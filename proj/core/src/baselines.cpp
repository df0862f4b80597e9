#include "vocbf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vocbf {

Rng make_agent_rng(std::uint64_t seed, int agent_id)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(agent_id), 0x5eedu};
  return Rng(seq);
}

std::vector<VelocitySample> sample_admissible(const Vec2 & v_current, double u_max, double dt, double v_max, int n,
                                              Rng & rng)
{
  if (n < 1) { throw std::invalid_argument("need at least one sample"); }
  const double reach = u_max * dt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VelocitySample> out;
  out.reserve(n);
  out.push_back({clamp_norm(v_current, v_max), 0.0});
  for (int k = 1; k < n; ++k) {
    const double r = reach * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    out.push_back({clamp_norm(v_current + r * Vec2(std::cos(ang), std::sin(ang)), v_max), 0.0});
  }
  return out;
}

double vo_rvo_penalty(const Vec2 & v, const DiscState & self, std::span<const DiscState> obstacles, const Vec2 & v_des,
                      ObstacleModel model, double w_max)
{
  // velocity of self relative to the obstacle along which the ray is cast
  const Vec2 own = model == ObstacleModel::vo ? v : Vec2(2.0 * v - self.velocity);
  double t_min = kInf;
  for (const auto & ob : obstacles) {
    const auto pair = PairGeometry::make(ob.position - self.position, ob.velocity - own, self.radius + ob.radius);
    t_min = std::min(t_min, time_to_collision(pair));
  }
  return vo_weight(t_min, w_max) + (v - v_des).norm();
}

std::optional<OvvoTerms> ovvo_terms(const Vec2 & v, const DiscState & self, const DiscState & obstacle)
{
  const Vec2 p = obstacle.position - self.position;
  const Vec2 w = v - obstacle.velocity;
  const double closing = p.dot(w);
  const double w2 = w.squaredNorm();
  if (closing <= 0.0 || w2 == 0.0) { return std::nullopt; }

  OvvoTerms t;
  t.pass_time = closing / w2;
  // closest approach of the relative motion p - t w
  const double miss = (p - t.pass_time * w).norm();
  t.clearance = std::max(0.0, miss - self.radius - obstacle.radius);
  return t;
}

double ovvo_obstacle_cost(const OvvoTerms & t, const ScenarioConfig & cfg)
{
  const double dv = std::max(t.clearance, kOvvoFloor);
  const double tp = std::max(t.pass_time, kOvvoFloor);
  return cfg.k_tp * std::pow(dv, -cfg.c1) * std::pow(tp, -cfg.c2);
}

double ovvo_penalty(const Vec2 & v, const DiscState & self, std::span<const DiscState> obstacles, const Vec2 & v_des,
                    const ScenarioConfig & cfg)
{
  double cost = cfg.k_vd * (v - v_des).norm();
  for (const auto & ob : obstacles) {
    if (const auto t = ovvo_terms(v, self, ob)) { cost += ovvo_obstacle_cost(*t, cfg); }
  }
  return cost;
}

HvoResult hvo_control(int agent_index, const World & world, const ScenarioConfig & cfg)
{
  HvoResult out;
  try {
    const AssembledQp qp = assemble_qp(agent_index, world, cfg, QpMode::hard_vo);
    const QpSolution sol = solve_qp(qp.problem);
    out.status = sol.status;
    if (sol.ok()) {
      out.u = sol.x.head<2>();
      return out;
    }
  } catch (const DegeneratePairError &) {
    out.status = QpStatus::failed;
  }
  out.feasible = false;
  out.u = Vec2::Zero();
  return out;
}

Vec2 select_velocity(int agent_index, const World & world, ControllerKind kind, const ScenarioConfig & cfg, Rng & rng)
{
  const AgentState & self = world.agents.at(agent_index);
  std::vector<DiscState> obstacles;
  obstacles.reserve(world.agents.size());
  for (const auto & a : world.agents) {
    if (a.id != self.id) { obstacles.push_back(a.disc()); }
  }
  const Vec2 v_des = desired_velocity(self, cfg);
  const DiscState me = self.disc();
  const double dt = cfg.timestep_s;

  auto samples = sample_admissible(self.velocity, cfg.max_acceleration_mps2, dt, cfg.max_velocity_mps,
                                   cfg.n_sampling_points, rng);
  std::size_t best = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto & s = samples[k];
    switch (kind) {
    case ControllerKind::vo:
      s.penalty = vo_rvo_penalty(s.v, me, obstacles, v_des, ObstacleModel::vo, cfg.max_vo_weight);
      break;
    case ControllerKind::rvo:
      s.penalty = vo_rvo_penalty(s.v, me, obstacles, v_des, ObstacleModel::rvo, cfg.max_vo_weight);
      break;
    case ControllerKind::ovvo:
      s.penalty = ovvo_penalty(s.v, me, obstacles, v_des, cfg);
      break;
    default:
      throw std::invalid_argument("select_velocity handles only sampling controllers");
    }
    if (s.penalty < samples[best].penalty) { best = k; }
  }
  return clamp_norm((samples[best].v - self.velocity) / dt, cfg.max_acceleration_mps2);
}

}  // namespace vocbf
