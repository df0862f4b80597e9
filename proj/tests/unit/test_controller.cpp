#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vocbf/controller.hpp"
#include "vocbf/simulation.hpp"

using namespace vocbf;

namespace {

AgentState agent(int id, Vec2 p, Vec2 v, Vec2 goal)
{
  AgentState a;
  a.id = id;
  a.position = p;
  a.velocity = v;
  a.goal = goal;
  a.radius = 0.5;
  return a;
}

ScenarioConfig integrator_cfg() { return ScenarioConfig::defaults(DynamicsKind::integrator); }

// Agent 0 heading for a slowly crossing neighbor, so one cone row with a positive weight.
World conflict_world()
{
  World w;
  w.agents.push_back(agent(0, {0, 0}, {0.8, 0.1}, {10, 0}));
  w.agents.push_back(agent(1, {3, 0.4}, {-0.3, 0}, {-10, 0}));
  return w;
}

bool in_polygon(const Vec2 & u, const ScenarioConfig & cfg, double tol = 0.0)
{
  for (const auto & r : input_set_rows(cfg)) {
    if (!r.satisfied(u, tol)) { return false; }
  }
  return true;
}

}  // namespace

TEST(ReferenceControl, Examples)
{
  const auto cfg = integrator_cfg();
  EXPECT_EQ(reference_control(agent(0, {0, 0}, {0, 0}, {0, 0}), cfg), Vec2(0, 0));
  EXPECT_EQ(reference_control(agent(0, {0, 0}, {0, 0}, {10, 0}), cfg), Vec2(1, 0));
  EXPECT_EQ(reference_control(agent(0, {0, 0}, {1, 0}, {10, 0}), cfg), Vec2(0, 0));
}

TEST(ReferenceControl, BoundedByInputLimit)
{
  const auto cfg = integrator_cfg();
  oracle::Rng rng(41);
  for (int k = 0; k < 1000; ++k) {
    const auto a = agent(0, oracle::uniform_vec(rng, -10, 10), oracle::uniform_vec(rng, -2, 2), oracle::uniform_vec(rng, -10, 10));
    EXPECT_LE(reference_control(a, cfg).norm(), cfg.max_acceleration_mps2 + 1e-12);
  }
}

TEST(ReferenceControl, CarIsBoxClipped)
{
  const auto cfg = ScenarioConfig::defaults(DynamicsKind::car);
  AgentState a = agent(0, {0, 0}, {0, 0}, {-20, 0.1});
  const Vec2 u = reference_control(a, cfg);
  EXPECT_LE(std::abs(u.x()), cfg.max_steering_tan);
  EXPECT_LE(std::abs(u.y()), cfg.max_acceleration_mps2);
  EXPECT_NE(u.x(), 0.0);  // goal behind: steer
}

TEST(InputSet, PolygonInscribedInDisc)
{
  const auto cfg = integrator_cfg();
  const auto rows = input_set_rows(cfg);
  ASSERT_EQ(rows.size(), 16u);
  // every vertex on the circle of radius u_max
  for (int k = 0; k < 16; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / 16;
    const Vec2 vtx = cfg.max_acceleration_mps2 * Vec2(std::cos(ang), std::sin(ang));
    EXPECT_TRUE(in_polygon(vtx, cfg, 1e-12));
    EXPECT_FALSE(in_polygon(1.001 * vtx, cfg));
  }
  EXPECT_NEAR(cfg.braking_budget(), std::cos(std::numbers::pi / 16), 1e-15);
}

TEST(AssembleQp, NoNeighbors)
{
  const auto cfg = integrator_cfg();
  World w;
  w.agents.push_back(agent(0, {0, 0}, {0.2, 0}, {5, 5}));
  const auto qp = assemble_qp(0, w, cfg);
  EXPECT_EQ(qp.problem.dim(), 2);
  EXPECT_EQ(qp.n_vo_rows + qp.n_safety_rows, 0);
  const auto out = compute_control(0, w, cfg);
  EXPECT_FALSE(out.fallback);
  EXPECT_NEAR((out.u - reference_control(w.agents[0], cfg)).norm(), 0.0, 1e-12);
}

TEST(AssembleQp, ZeroWeightNeighborKeepsSafetyRow)
{
  const auto cfg = integrator_cfg();
  World w;
  // closing but on a miss course: no predicted collision
  w.agents.push_back(agent(0, {0, 0}, {1, 0}, {10, 0}));
  w.agents.push_back(agent(1, {3, 2}, {0, 0}, {3, 2}));
  const auto qp = assemble_qp(0, w, cfg);
  EXPECT_TRUE(qp.slacks.empty());
  EXPECT_EQ(qp.problem.dim(), 2);
  EXPECT_EQ(qp.n_safety_rows, 1);
}

TEST(AssembleQp, StructureInvariants)
{
  const auto cfg = integrator_cfg();
  World w = conflict_world();
  w.agents.push_back(agent(2, {2, -2}, {0, 0.6}, {2, 5}));
  const auto qp = assemble_qp(0, w, cfg);
  const auto & H = qp.problem.H;
  EXPECT_TRUE(H.isApprox(H.transpose()));
  EXPECT_EQ(H(0, 0), 2.0 * cfg.k_u);
  EXPECT_EQ(H(1, 1), 2.0 * cfg.k_u);
  ASSERT_FALSE(qp.slacks.empty());
  for (std::size_t s = 0; s < qp.slacks.size(); ++s) {
    const auto & sl = qp.slacks[s];
    EXPECT_DOUBLE_EQ(H(sl.column, sl.column), 2.0 * cfg.k_vo * sl.weight);
    const auto & row = qp.problem.rows[s];
    for (const auto & other : qp.slacks) { EXPECT_EQ(row.a(other.column), other.column == sl.column ? -1.0 : 0.0); }
  }
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().minCoeff(), 0.0);
}

TEST(AssembleQp, HardVoModeHasNoSlacksOrBrakingRows)
{
  const auto cfg = integrator_cfg();
  const auto qp = assemble_qp(0, conflict_world(), cfg, QpMode::hard_vo);
  EXPECT_EQ(qp.problem.dim(), 2);
  EXPECT_EQ(qp.n_vo_rows, 1);
  EXPECT_EQ(qp.n_safety_rows, 0);
}

TEST(ComputeControl, SlackIsOneSidedPenalty)
{
  const auto cfg = integrator_cfg();
  const World w = conflict_world();
  const auto qp = assemble_qp(0, w, cfg);
  ASSERT_EQ(qp.slacks.size(), 1u);
  const auto sol = solve_qp(qp.problem);
  ASSERT_TRUE(sol.ok());
  EXPECT_LE(max_slack_residual(qp, sol, 0, w, cfg), 1e-5);
  EXPECT_LT(sol.x(qp.slacks[0].column), 0.0);  // the cone row is being relaxed
}

// Minimizing over u alone with lambda eliminated gives the same optimum as the QP.
TEST(ComputeControl, MatchesGridSearch)
{
  auto cfg = integrator_cfg();
  cfg.k_vo = 1.0;
  const World w = conflict_world();
  const auto qp = assemble_qp(0, w, cfg);
  ASSERT_EQ(qp.slacks.size(), 1u);
  const auto sol = solve_qp(qp.problem);
  ASSERT_TRUE(sol.ok());

  const auto pair = PairGeometry::make(w.agents[0].disc(), w.agents[1].disc());
  const ConeCbfValue cone = h_vo_dot_terms(pair);
  const double weight = qp.slacks[0].weight;
  const Vec2 u_ref = qp.u_ref;
  const SafetyParams sp{cfg.alpha_c, cfg.braking_budget(), cfg.safety_margin_m + cfg.safety_tightening_m, cfg.safety_share};
  const auto brake = safety_constraint_row(w.agents[0].disc(), w.agents[1].disc(), sp);
  auto reduced = [&](const Vec2 & u) {
    const double g = cone.hdot(-u) + cfg.alpha_vo * cone.h;
    const double lambda = std::min(0.0, g);
    return cfg.k_u * (u - u_ref).squaredNorm() + cfg.k_vo * weight * lambda * lambda;
  };
  auto feasible = [&](const Vec2 & u) { return in_polygon(u, cfg) && (!brake || brake->satisfied(u, 0.0)); };

  double best = kInf;
  const double lim = cfg.max_acceleration_mps2;
  for (int a = 0; a <= 200; ++a) {
    for (int b = 0; b <= 200; ++b) {
      const Vec2 u(-lim + 2.0 * lim * a / 200, -lim + 2.0 * lim * b / 200);
      if (feasible(u)) { best = std::min(best, reduced(u)); }
    }
  }
  const Vec2 u_star = sol.x.head<2>();
  const double at_star = reduced(u_star);
  EXPECT_LE(at_star, best + 1e-9);
  EXPECT_NEAR(at_star, best, 1e-3);
  // the QP objective differs from the reduced one by the constant k_u |u_ref|^2
  EXPECT_NEAR(sol.objective + cfg.k_u * u_ref.squaredNorm(), at_star, 1e-9);
}

TEST(ComputeControl, RespectsInputAndBrakingRows)
{
  const auto cfg = integrator_cfg();
  oracle::Rng rng(42);
  int solved = 0;
  for (int k = 0; k < 300; ++k) {
    World w;
    for (int a = 0; a < 4; ++a) {
      Vec2 p;
      bool ok = false;
      while (!ok) {
        p = oracle::uniform_vec(rng, -4, 4);
        ok = true;
        for (const auto & o : w.agents) { ok = ok && (o.position - p).norm() > 1.3; }
      }
      w.agents.push_back(agent(a, p, oracle::uniform_vec(rng, -1, 1), oracle::uniform_vec(rng, -8, 8)));
    }
    const auto out = compute_control(0, w, cfg);
    EXPECT_LE(out.u.norm(), cfg.max_acceleration_mps2 + 1e-9);
    if (out.fallback) { continue; }
    ++solved;
    const auto qp = assemble_qp(0, w, cfg);
    for (int r = qp.n_vo_rows; r < qp.n_vo_rows + qp.n_safety_rows; ++r) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(qp.problem.dim());
      x.head<2>() = out.u;
      EXPECT_GE(qp.problem.rows[r].slack(x), -1e-8);
    }
    EXPECT_LE(out.max_slack_residual, 1e-5);
  }
  EXPECT_GT(solved, 250);
}

TEST(ComputeControl, Deterministic)
{
  const auto cfg = integrator_cfg();
  const World w = conflict_world();
  const auto a = compute_control(0, w, cfg);
  const auto b = compute_control(0, w, cfg);
  EXPECT_EQ(a.u.x(), b.u.x());
  EXPECT_EQ(a.u.y(), b.u.y());
}

TEST(ComputeControl, CarUsesAccelerationMap)
{
  const auto cfg = ScenarioConfig::defaults(DynamicsKind::car);
  AgentState a = agent(0, {0, 0}, {0, 0}, {20, 0});
  a.theta = 0.3;
  a.speed = 1.5;
  a.velocity = a.speed * Vec2(std::cos(a.theta), std::sin(a.theta));
  EXPECT_TRUE(input_map(a, cfg).isApprox(car_accel_map(a.car(), cfg.wheelbase_m)));
  World w;
  w.agents.push_back(a);
  w.agents.push_back(agent(1, {4, 1.5}, {-1, 0}, {-20, 0}));
  const auto out = compute_control(0, w, cfg);
  EXPECT_LE(std::abs(out.u.x()), cfg.max_steering_tan + 1e-9);
  EXPECT_LE(std::abs(out.u.y()), cfg.max_acceleration_mps2 + 1e-9);
}

TEST(BrakingControl, OpposesVelocityWithinBudget)
{
  const auto cfg = integrator_cfg();
  const auto a = agent(0, {0, 0}, {1.5, -0.5}, {0, 0});
  const Vec2 u = braking_control(a, cfg);
  EXPECT_NEAR(u.normalized().dot(-a.velocity.normalized()), 1.0, 1e-12);
  EXPECT_NEAR(u.norm(), cfg.braking_budget(), 1e-12);
  EXPECT_TRUE(in_polygon(u, cfg));
  // slow agents stop exactly in one step
  const auto slow = agent(0, {0, 0}, {0.001, 0}, {0, 0});
  EXPECT_NEAR((slow.velocity + cfg.timestep_s * braking_control(slow, cfg)).norm(), 0.0, 1e-15);
}

TEST(SoftenSafetyRows, AddsSharedNonnegativeColumn)
{
  const auto cfg = integrator_cfg();
  World w = conflict_world();
  w.agents.push_back(agent(2, {-1.5, 0}, {1.0, 0}, {5, 0}));
  const auto qp = assemble_qp(0, w, cfg);
  ASSERT_GE(qp.n_safety_rows, 1);
  const auto soft = soften_safety_rows(qp, 7.0);
  const Eigen::Index col = qp.problem.dim();
  ASSERT_EQ(soft.problem.dim(), col + 1);
  EXPECT_EQ(soft.problem.H(col, col), 14.0);
  EXPECT_TRUE(soft.problem.H.topLeftCorner(col, col).isApprox(qp.problem.H));
  ASSERT_EQ(soft.problem.rows.size(), qp.problem.rows.size() + 1);
  for (int r = 0; r < static_cast<int>(qp.problem.rows.size()); ++r) {
    const bool braking = r >= qp.n_vo_rows && r < qp.n_vo_rows + qp.n_safety_rows;
    EXPECT_EQ(soft.problem.rows[r].a(col), braking ? 1.0 : 0.0);
  }
  EXPECT_EQ(soft.problem.rows.back().a(col), 1.0);
  EXPECT_EQ(soft.problem.rows.back().b, 0.0);
}

TEST(SoftenSafetyRows, SandwichFallsBackToLeastViolation)
{
  const auto cfg = integrator_cfg();
  World w;
  w.agents.push_back(agent(0, {0, 0}, {0, 0}, {0, 8}));
  w.agents.push_back(agent(1, {1.15, 0}, {-1.5, 0}, {-8, 0}));
  w.agents.push_back(agent(2, {-1.15, 0}, {1.5, 0}, {8, 0}));
  const auto qp = assemble_qp(0, w, cfg);
  ASSERT_EQ(qp.n_safety_rows, 2);
  EXPECT_EQ(solve_qp(qp.problem).status, QpStatus::infeasible);

  const auto soft = solve_qp(soften_safety_rows(qp, kSafetyViolationWeight).problem);
  ASSERT_TRUE(soft.ok());
  EXPECT_GT(soft.x(soft.x.size() - 1), 0.0);

  const auto out = compute_control(0, w, cfg);
  EXPECT_TRUE(out.fallback);
  EXPECT_EQ(out.status, QpStatus::infeasible);
  // symmetric squeeze: no preferred side along x
  EXPECT_NEAR(out.u.x(), 0.0, 1e-6);
}

TEST(ComputeControl, CoincidentCentersBrake)
{
  const auto cfg = integrator_cfg();
  World w;
  w.agents.push_back(agent(0, {1, 1}, {0.5, 0}, {5, 5}));
  w.agents.push_back(agent(1, {1, 1}, {0, 0}, {-5, 5}));
  const auto out = compute_control(0, w, cfg);
  EXPECT_TRUE(out.fallback);
  EXPECT_EQ(out.u, braking_control(w.agents[0], cfg));
}

TEST(ClosedLoop, HeadOnPairStaysPointSymmetric)
{
  auto cfg = integrator_cfg();
  cfg.noise_std_m = 0.0;
  cfg.n_agents = 2;
  const auto res = run_episode(cfg);
  ASSERT_TRUE(res.all_succeeded);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < res.trace.size(); k += 2) {
    const auto & a = res.trace[k];
    const auto & b = res.trace[k + 1];
    ASSERT_EQ(a.t, b.t);
    worst = std::max({worst, (a.p + b.p).norm(), (a.u + b.u).norm()});
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ClosedLoop, EightAgentsZeroNoiseStaySafe)
{
  auto cfg = integrator_cfg();
  cfg.noise_std_m = 0.0;
  cfg.n_agents = 8;
  const auto res = run_episode(cfg);
  EXPECT_EQ(res.collisions, 0);
  EXPECT_GE(res.min_h_c, -1e-6);
  EXPECT_TRUE(res.all_succeeded);
}
