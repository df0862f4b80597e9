#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vocbf/baselines.hpp"
#include "vocbf/controller.hpp"
#include "vocbf/qp_solver.hpp"
#include "vocbf/simulation.hpp"

using namespace vocbf;

namespace {

ScenarioConfig circle(int n, ControllerKind kind)
{
  auto cfg = ScenarioConfig::defaults(DynamicsKind::integrator);
  cfg.n_agents = n;
  cfg.controller = kind;
  cfg.seed = 1;
  return cfg;
}

// advance a few seconds so neighbors are close and rows are active
World warmed_up(const ScenarioConfig & cfg, std::vector<Rng> & rngs, int steps)
{
  World w = make_circle_scenario(cfg);
  for (int k = 0; k < steps; ++k) { w = step_world(w, cfg, rngs).world; }
  return w;
}

std::vector<Rng> agent_rngs(const ScenarioConfig & cfg)
{
  std::vector<Rng> rngs;
  for (int i = 0; i < cfg.n_agents; ++i) { rngs.push_back(make_agent_rng(cfg.seed, i)); }
  return rngs;
}

QpProblem random_qp(std::mt19937_64 & rng, int dim, int n_rows)
{
  std::normal_distribution<double> nd;
  Eigen::MatrixXd r(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) { r(i, j) = nd(rng); }
  }
  QpProblem qp;
  qp.H = r.transpose() * r + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
  qp.f = Eigen::VectorXd::NullaryExpr(dim, [&] { return nd(rng); });
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(dim, [&] { return nd(rng); });
  for (int k = 0; k < n_rows; ++k) {
    LinearConstraintRow row;
    row.a = Eigen::VectorXd::NullaryExpr(dim, [&] { return nd(rng); });
    row.b = row.a.dot(x0) - 0.5;
    qp.rows.push_back(row);
  }
  return qp;
}

}  // namespace

static void BM_SolveRandomQp(benchmark::State & state)
{
  std::mt19937_64 rng(3);
  const int dim = static_cast<int>(state.range(0));
  const auto qp = random_qp(rng, dim, 2 * dim);
  for (auto _ : state) { benchmark::DoNotOptimize(solve_qp(qp)); }
}
BENCHMARK(BM_SolveRandomQp)->Arg(2)->Arg(8)->Arg(14);

static void BM_AssembleAndSolve(benchmark::State & state)
{
  const auto cfg = circle(static_cast<int>(state.range(0)), ControllerKind::ours);
  auto rngs = agent_rngs(cfg);
  const World w = warmed_up(cfg, rngs, 300);
  for (auto _ : state) { benchmark::DoNotOptimize(compute_control(0, w, cfg)); }
}
BENCHMARK(BM_AssembleAndSolve)->Arg(4)->Arg(8)->Arg(12);

static void BM_StepWorld(benchmark::State & state)
{
  const auto kind = static_cast<ControllerKind>(state.range(1));
  const auto cfg = circle(static_cast<int>(state.range(0)), kind);
  auto rngs = agent_rngs(cfg);
  const World w = warmed_up(cfg, rngs, 300);
  for (auto _ : state) { benchmark::DoNotOptimize(step_world(w, cfg, rngs)); }
}
BENCHMARK(BM_StepWorld)
    ->Args({8, static_cast<int>(ControllerKind::ours)})
    ->Args({12, static_cast<int>(ControllerKind::ours)})
    ->Args({12, static_cast<int>(ControllerKind::rvo)})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
