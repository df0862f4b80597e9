#include "vocbf/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vocbf/safety.hpp"

namespace vocbf {

Vec2 desired_velocity(const AgentState & agent, const ScenarioConfig & cfg)
{
  return clamp_norm(cfg.p_coefficient * (agent.goal - agent.position), cfg.preferred_velocity_mps);
}

Vec2 reference_control(const AgentState & agent, const ScenarioConfig & cfg)
{
  if (cfg.dynamics == DynamicsKind::integrator) {
    const Vec2 u = cfg.p_coefficient * (desired_velocity(agent, cfg) - agent.velocity);
    return clamp_norm(u, cfg.max_acceleration_mps2);
  }

  const Vec2 e = agent.goal - agent.position;
  const double dist = e.norm();
  const double heading_err = dist > 0.0 ? wrap_angle(std::atan2(e.y(), e.x()) - agent.theta) : 0.0;
  const double speed_des =
    std::min(cfg.preferred_velocity_mps, cfg.p_coefficient * dist) * std::max(0.0, std::cos(heading_err));
  const double accel = cfg.car_speed_gain * (speed_des - agent.speed);
  const double steer = cfg.car_steering_gain * heading_err;
  return {std::clamp(steer, -cfg.max_steering_tan, cfg.max_steering_tan),
          std::clamp(accel, -cfg.max_acceleration_mps2, cfg.max_acceleration_mps2)};
}

Mat2 input_map(const AgentState & agent, const ScenarioConfig & cfg)
{
  if (cfg.dynamics == DynamicsKind::car) { return car_accel_map(agent.car(), cfg.wheelbase_m); }
  return Mat2::Identity();
}

std::vector<LinearConstraintRow> input_set_rows(const ScenarioConfig & cfg)
{
  std::vector<LinearConstraintRow> rows;
  auto add = [&rows](double ax, double ay, double b) {
    LinearConstraintRow r;
    r.a = Eigen::Vector2d(ax, ay);
    r.b = b;
    rows.push_back(std::move(r));
  };
  if (cfg.dynamics == DynamicsKind::car) {
    add(1.0, 0.0, -cfg.max_steering_tan);
    add(-1.0, 0.0, -cfg.max_steering_tan);
    add(0.0, 1.0, -cfg.max_acceleration_mps2);
    add(0.0, -1.0, -cfg.max_acceleration_mps2);
    return rows;
  }
  // regular polygon inscribed in |u| <= u_max, one vertex on the +x axis
  const int n = cfg.input_polygon_sides;
  const double offset = cfg.braking_budget();
  for (int k = 0; k < n; ++k) {
    const double ang = (2.0 * k + 1.0) * std::numbers::pi / n;
    add(-std::cos(ang), -std::sin(ang), -offset);
  }
  return rows;
}

namespace {

Eigen::VectorXd embed(const Vec2 & coeffs, Eigen::Index dim)
{
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
  a.head<2>() = coeffs;
  return a;
}

}  // namespace

AssembledQp assemble_qp(int agent_index, const World & world, const ScenarioConfig & cfg, QpMode mode)
{
  const AgentState & self = world.agents.at(agent_index);
  AssembledQp out;
  out.u_ref = reference_control(self, cfg);
  out.input_map = input_map(self, cfg);
  const Mat2 & M = out.input_map;

  struct Neighbor
  {
    int index;
    PairGeometry pair;
    double weight;
  };
  std::vector<Neighbor> neighbors;
  for (int j = 0; j < static_cast<int>(world.agents.size()); ++j) {
    if (j == agent_index) { continue; }
    const auto pair = PairGeometry::make(self.disc(), world.agents[j].disc());
    if (!(pair.dist > 0.0)) { throw DegeneratePairError("agent centers coincide"); }
    const double w = mode == QpMode::relaxed ? vo_weight(time_to_collision(pair), cfg.max_vo_weight) : 0.0;
    neighbors.push_back({j, pair, w});
  }

  Eigen::Index dim = 2;
  if (mode == QpMode::relaxed) {
    for (const auto & nb : neighbors) {
      if (nb.weight > 0.0) { out.slacks.push_back({nb.index, dim++, nb.weight}); }
    }
  }

  QpProblem & qp = out.problem;
  qp.H = Eigen::MatrixXd::Zero(dim, dim);
  qp.f = Eigen::VectorXd::Zero(dim);
  qp.H(0, 0) = qp.H(1, 1) = 2.0 * cfg.k_u;
  qp.f.head<2>() = -2.0 * cfg.k_u * out.u_ref;
  for (const auto & s : out.slacks) { qp.H(s.column, s.column) = 2.0 * cfg.k_vo * s.weight; }

  // cone rows: hdot_vo = grad . u_rel + drift with u_rel = -M u
  auto cone_row = [&](const PairGeometry & pair) {
    const ConeCbfValue cone = h_vo_dot_terms(pair);
    LinearConstraintRow row;
    row.a = embed(-(M.transpose() * cone.grad_u), dim);
    row.b = -cone.drift - cfg.alpha_vo * cone.h;
    return row;
  };
  if (mode == QpMode::relaxed) {
    for (const auto & s : out.slacks) {
      const auto it = std::find_if(neighbors.begin(), neighbors.end(), [&](const Neighbor & nb) { return nb.index == s.neighbor; });
      LinearConstraintRow row = cone_row(it->pair);
      row.a(s.column) = -1.0;
      qp.rows.push_back(std::move(row));
      ++out.n_vo_rows;
    }
    const SafetyParams sp{cfg.alpha_c, cfg.braking_budget(), cfg.safety_margin_m + cfg.safety_tightening_m,
                          cfg.safety_share};
    for (const auto & nb : neighbors) {
      auto row = safety_constraint_row(self.disc(), world.agents[nb.index].disc(), sp);
      if (!row) { continue; }
      LinearConstraintRow full;
      full.a = embed(M.transpose() * Vec2(row->a), dim);
      full.b = row->b;
      qp.rows.push_back(std::move(full));
      ++out.n_safety_rows;
    }
  } else {
    for (const auto & nb : neighbors) {
      qp.rows.push_back(cone_row(nb.pair));
      ++out.n_vo_rows;
    }
  }

  for (const auto & r : input_set_rows(cfg)) {
    qp.rows.push_back({embed(Vec2(r.a), dim), r.b});
    ++out.n_input_rows;
  }
  return out;
}

Vec2 braking_control(const AgentState & agent, const ScenarioConfig & cfg)
{
  const double dt = cfg.timestep_s;
  if (cfg.dynamics == DynamicsKind::car) {
    return {0.0, std::max(-cfg.max_acceleration_mps2, -agent.speed / dt)};
  }
  return clamp_norm(-agent.velocity / dt, cfg.braking_budget());
}

double max_slack_residual(const AssembledQp & qp, const QpSolution & sol, int agent_index, const World & world,
                          const ScenarioConfig & cfg)
{
  const AgentState & self = world.agents.at(agent_index);
  const Vec2 u = sol.x.head<2>();
  const Vec2 u_rel = -(qp.input_map * u);
  double worst = 0.0;
  for (const auto & s : qp.slacks) {
    const auto pair = PairGeometry::make(self.disc(), world.agents.at(s.neighbor).disc());
    const ConeCbfValue cone = h_vo_dot_terms(pair);
    const double g = cone.hdot(u_rel) + cfg.alpha_vo * cone.h;
    const double lambda = sol.x(s.column);
    worst = std::max(worst, std::abs(lambda - std::min(0.0, g)) / std::max(1.0, std::abs(lambda)));
  }
  return worst;
}

AssembledQp soften_safety_rows(const AssembledQp & qp, double weight)
{
  AssembledQp out = qp;
  QpProblem & prob = out.problem;
  const Eigen::Index n = prob.dim();
  const Eigen::Index col = n;
  prob.H.conservativeResize(n + 1, n + 1);
  prob.H.row(col).setZero();
  prob.H.col(col).setZero();
  prob.H(col, col) = 2.0 * weight;
  prob.f.conservativeResize(n + 1);
  prob.f(col) = 0.0;
  for (std::size_t r = 0; r < prob.rows.size(); ++r) {
    auto & a = prob.rows[r].a;
    a.conservativeResize(n + 1);
    const auto k = static_cast<int>(r);
    a(col) = (k >= qp.n_vo_rows && k < qp.n_vo_rows + qp.n_safety_rows) ? 1.0 : 0.0;
  }
  LinearConstraintRow nonneg;
  nonneg.a = Eigen::VectorXd::Zero(n + 1);
  nonneg.a(col) = 1.0;
  prob.rows.push_back(std::move(nonneg));
  return out;
}

ControlOutput compute_control(int agent_index, const World & world, const ScenarioConfig & cfg)
{
  ControlOutput out;
  const AgentState & self = world.agents.at(agent_index);
  try {
    const AssembledQp qp = assemble_qp(agent_index, world, cfg, QpMode::relaxed);
    const QpSolution sol = solve_qp(qp.problem);
    out.status = sol.status;
    out.qp_iterations = sol.iterations;
    out.n_slacks = static_cast<int>(qp.slacks.size());
    if (sol.ok()) {
      out.u = sol.x.head<2>();
      out.max_slack_residual = max_slack_residual(qp, sol, agent_index, world, cfg);
      return out;
    }
    if (sol.status == QpStatus::infeasible && qp.n_safety_rows > 1) {
      const QpSolution soft = solve_qp(soften_safety_rows(qp, kSafetyViolationWeight).problem);
      if (soft.ok()) {
        out.fallback = true;
        out.u = soft.x.head<2>();
        return out;
      }
    }
  } catch (const DegeneratePairError &) {
    out.status = QpStatus::failed;
  }
  out.fallback = true;
  out.u = braking_control(self, cfg);
  return out;
}

}  // namespace vocbf
