#include "vocbf/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "vocbf/controller.hpp"
#include "vocbf/safety.hpp"

namespace vocbf {

double EpisodeResult::mean_solve_ms() const
{
  if (solve_times_ms.empty()) { return 0.0; }
  return std::accumulate(solve_times_ms.begin(), solve_times_ms.end(), 0.0) / static_cast<double>(solve_times_ms.size());
}

World make_circle_scenario(const ScenarioConfig & cfg)
{
  cfg.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0xc12c1eu};
  Rng rng(seq);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double clip = 3.0;

  World world;
  world.agents.reserve(cfg.n_agents);
  for (int k = 0; k < cfg.n_agents; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / cfg.n_agents;
    const Vec2 nominal = cfg.circle_radius_m * Vec2(std::cos(ang), std::sin(ang));
    Vec2 offset = Vec2::Zero();
    if (cfg.noise_std_m > 0.0) {
      const double nx = std::clamp(noise(rng), -clip, clip);
      const double ny = std::clamp(noise(rng), -clip, clip);
      offset = cfg.noise_std_m * Vec2(nx, ny);
    }
    AgentState a;
    a.id = k;
    a.position = nominal + offset;
    a.goal = -nominal;
    a.radius = cfg.agent_radius_m;
    if (cfg.dynamics == DynamicsKind::car) {
      const Vec2 e = a.goal - a.position;
      a.theta = std::atan2(e.y(), e.x());
    }
    world.agents.push_back(a);
  }
  return world;
}

namespace {

AgentState integrate(const AgentState & a, const Vec2 & u, const ScenarioConfig & cfg)
{
  AgentState next = a;
  if (cfg.dynamics == DynamicsKind::integrator) {
    const auto s = integrator_step(a.integrator(), u, cfg.timestep_s, cfg.max_velocity_mps);
    next.position = s.p;
    next.velocity = s.v;
    return next;
  }
  const auto s = car_step(a.car(), {u.x(), u.y()}, cfg.timestep_s, cfg.wheelbase_m, cfg.max_velocity_mps);
  next.position = s.p;
  next.theta = s.theta;
  next.speed = s.v;
  next.velocity = s.velocity();
  return next;
}

AgentStepInfo agent_control(int i, const World & world, const ScenarioConfig & cfg, Rng & rng)
{
  using clock = std::chrono::steady_clock;
  AgentStepInfo info;
  const AgentState & a = world.agents[i];
  const auto t0 = clock::now();
  if (a.reached) {
    info.u = braking_control(a, cfg);
  } else {
    switch (cfg.controller) {
    case ControllerKind::ours: {
      const auto out = compute_control(i, world, cfg);
      info.u = out.u;
      info.fallback = out.fallback;
      info.infeasible = out.status != QpStatus::optimal;
      info.solved_qp = !out.fallback;
      info.n_slacks = out.n_slacks;
      info.slack_residual = out.max_slack_residual;
      break;
    }
    case ControllerKind::hvo: {
      const auto out = hvo_control(i, world, cfg);
      info.u = out.u;
      info.infeasible = !out.feasible;
      info.solved_qp = out.feasible;
      break;
    }
    default:
      info.u = select_velocity(i, world, cfg.controller, cfg, rng);
      break;
    }
  }
  info.solve_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  return info;
}

}  // namespace

StepResult step_world(const World & world, const ScenarioConfig & cfg, std::vector<Rng> & rngs,
                      std::span<const int> order)
{
  const int n = static_cast<int>(world.agents.size());
  std::vector<int> seq(n);
  if (order.empty()) {
    std::iota(seq.begin(), seq.end(), 0);
  } else {
    seq.assign(order.begin(), order.end());
  }

  StepResult out;
  out.info.resize(n);
  for (int i : seq) { out.info[i] = agent_control(i, world, cfg, rngs.at(i)); }
  if (cfg.dynamics == DynamicsKind::car) {
    // solver tolerance can leave the QP output a hair outside the box; record what is applied
    for (auto & info : out.info) {
      info.u = {std::clamp(info.u.x(), -cfg.max_steering_tan, cfg.max_steering_tan),
                std::clamp(info.u.y(), -cfg.max_acceleration_mps2, cfg.max_acceleration_mps2)};
    }
  }

  out.world.t = world.t + cfg.timestep_s;
  out.world.agents.reserve(n);
  for (int i = 0; i < n; ++i) {
    AgentState next = integrate(world.agents[i], out.info[i].u, cfg);
    if (!next.reached && (next.position - next.goal).norm() <= cfg.goal_tolerance_m) { next.reached = true; }
    out.world.agents.push_back(next);
  }
  return out;
}

int count_downward_crossings(std::span<const double> distances, double threshold)
{
  int events = 0;
  bool inside = false;
  for (double d : distances) {
    const bool now = d < threshold;
    if (now && !inside) { ++events; }
    inside = now;
  }
  return events;
}

int detect_collision_events(std::span<const TraceRow> trace, double agent_radius, double geometric_tolerance)
{
  // group rows by time, then by agent id
  std::map<int, std::vector<std::pair<double, Vec2>>> by_agent;
  for (const auto & r : trace) { by_agent[r.agent_id].emplace_back(r.t, r.p); }
  std::vector<const std::vector<std::pair<double, Vec2>> *> series;
  for (const auto & [id, s] : by_agent) { series.push_back(&s); }

  const double threshold = (1.0 - geometric_tolerance) * 2.0 * agent_radius;
  int events = 0;
  for (std::size_t a = 0; a < series.size(); ++a) {
    for (std::size_t b = a + 1; b < series.size(); ++b) {
      const auto & sa = *series[a];
      const auto & sb = *series[b];
      std::vector<double> dist;
      const std::size_t len = std::min(sa.size(), sb.size());
      dist.reserve(len);
      for (std::size_t k = 0; k < len; ++k) { dist.push_back((sa[k].second - sb[k].second).norm()); }
      events += count_downward_crossings(dist, threshold);
    }
  }
  return events;
}

namespace {

void record(EpisodeResult & res, const World & world, const std::vector<Vec2> & controls, const ScenarioConfig & cfg)
{
  const int n = static_cast<int>(world.agents.size());
  const double budget = cfg.braking_budget();
  for (int i = 0; i < n; ++i) {
    const AgentState & a = world.agents[i];
    TraceRow row;
    row.t = world.t;
    row.agent_id = a.id;
    row.p = a.position;
    row.v = a.velocity;
    row.u = controls[i];
    row.has_car_state = cfg.dynamics == DynamicsKind::car;
    row.theta = a.theta;
    row.speed = a.speed;
    for (int j = 0; j < n; ++j) {
      if (j == i) { continue; }
      const AgentState & b = world.agents[j];
      if ((b.position - a.position).norm() == 0.0) {
        row.min_h_c = -kInf;
        continue;
      }
      row.min_h_c = std::min(row.min_h_c, pair_h_c(a.disc(), b.disc(), cfg.safety_margin_m, budget).h);
      row.min_h_vo = std::min(row.min_h_vo, h_vo(PairGeometry::make(a.disc(), b.disc())));
    }
    res.min_h_c = std::min(res.min_h_c, row.min_h_c);
    res.trace.push_back(row);
  }
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig & cfg)
{
  EpisodeResult res;
  res.config = cfg;
  World world = make_circle_scenario(cfg);
  const int n = cfg.n_agents;
  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (int i = 0; i < n; ++i) { rngs.push_back(make_agent_rng(cfg.seed, i)); }

  res.success.assign(n, 0);
  res.arrival_time.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> infeasible_time(n, 0.0);

  const auto n_steps = static_cast<long>(std::llround(cfg.simulation_time_s / cfg.timestep_s));
  long step = 0;
  for (; step < n_steps; ++step) {
    world.t = static_cast<double>(step) * cfg.timestep_s;
    auto next = step_world(world, cfg, rngs);

    std::vector<Vec2> controls(n);
    double step_ms = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto & info = next.info[i];
      controls[i] = info.u;
      step_ms += info.solve_ms;
      if (info.infeasible) {
        ++res.infeasible_steps;
        infeasible_time[i] += cfg.timestep_s;
      }
      if (info.fallback) { ++res.fallback_steps; }
      if (info.solved_qp) { ++res.qp_solves; }
      res.slack_checks += info.n_slacks;
      res.max_slack_residual = std::max(res.max_slack_residual, info.slack_residual);
      res.max_abs_control_x = std::max(res.max_abs_control_x, std::abs(info.u.x()));
      res.max_abs_control_y = std::max(res.max_abs_control_y, std::abs(info.u.y()));
    }
    res.solve_times_ms.push_back(step_ms / n);
    record(res, world, controls, cfg);

    world = std::move(next.world);
    world.t = static_cast<double>(step + 1) * cfg.timestep_s;
    for (int i = 0; i < n; ++i) {
      if (world.agents[i].reached && !res.success[i]) {
        res.success[i] = 1;
        res.arrival_time[i] = world.t;
      }
    }

    if (std::all_of(res.success.begin(), res.success.end(), [](char s) { return s != 0; })) {
      ++step;
      break;
    }
    if (cfg.controller == ControllerKind::hvo) {
      const bool stuck = std::any_of(infeasible_time.begin(), infeasible_time.end(),
                                     [&](double t) { return t > cfg.hvo_infeasible_limit_s + 0.5 * cfg.timestep_s; });
      if (stuck) {
        res.terminated_early = true;
        ++step;
        break;
      }
    }
  }

  res.end_time = world.t;
  record(res, world, std::vector<Vec2>(n, Vec2::Zero()), cfg);
  res.collisions = detect_collision_events(res.trace, cfg.agent_radius_m, cfg.geometric_tolerance);
  res.all_succeeded = !res.terminated_early &&
                      std::all_of(res.success.begin(), res.success.end(), [](char s) { return s != 0; });
  if (res.terminated_early) { std::fill(res.success.begin(), res.success.end(), 0); }
  res.completion_time = res.end_time;
  if (res.all_succeeded) { res.completion_time = *std::max_element(res.arrival_time.begin(), res.arrival_time.end()); }
  return res;
}

MeanStd mean_std(std::span<const double> xs)
{
  MeanStd out;
  if (xs.empty()) { return out; }
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) { return out; }
  double ss = 0.0;
  for (double x : xs) { ss += (x - out.mean) * (x - out.mean); }
  out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

AggregateStats aggregate(std::span<const EpisodeResult> results)
{
  if (results.empty()) { throw std::invalid_argument("aggregate needs at least one result"); }
  AggregateStats out;
  out.runs = static_cast<int>(results.size());
  std::vector<double> collisions, completion, solve;
  int ok = 0;
  for (const auto & r : results) {
    collisions.push_back(r.collisions);
    completion.push_back(r.completion_time);
    solve.push_back(r.mean_solve_ms());
    ok += r.all_succeeded ? 1 : 0;
  }
  out.success_rate = static_cast<double>(ok) / out.runs;
  out.collisions = mean_std(collisions);
  out.completion_time = mean_std(completion);
  out.solve_ms = mean_std(solve);
  return out;
}

}  // namespace vocbf
