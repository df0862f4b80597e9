#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char ** argv)
{
  using namespace vocbf::cli;

  CLI::App app{"Velocity-obstacle guided CBF collision avoidance: simulation and benchmarks"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunOptions run;
  unsigned long long run_seed = 0;
  std::string run_controller;
  int run_agents = 0;
  auto * run_cmd = app.add_subcommand("run", "Run one episode and write trace.csv, metrics.json, manifest.json");
  run_cmd->add_option("--config", run.config_path, "Scenario config file")->required();
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
  auto * seed_opt = run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
  auto * ctrl_opt = run_cmd->add_option("--controller", run_controller, "Override the controller (ours, vo, rvo, hvo, ovvo)");
  auto * agents_opt = run_cmd->add_option("--agents", run_agents, "Override the agent count");

  CompareOptions cmp;
  bool no_timing = false;
  auto * cmp_cmd = app.add_subcommand("compare", "Run controllers x agent counts x seeds and write table.csv");
  cmp_cmd->add_option("--config", cmp.config_path, "Base scenario config file")->required();
  cmp_cmd->add_option("--out-dir", cmp.out_dir, "Output directory");
  cmp_cmd->add_option("--controller", cmp.controllers, "Controllers to compare")->delimiter(',');
  cmp_cmd->add_option("--agents", cmp.agents, "Agent counts")->delimiter(',');
  cmp_cmd->add_option("--seeds", cmp.seeds, "Seeds per cell, counted up from the config seed");
  cmp_cmd->add_option("--threads", cmp.threads, "Worker threads (capped by NAV_THREADS)");
  cmp_cmd->add_flag("--no-timing", no_timing, "Leave solve-time columns empty for byte-reproducible tables");

  std::string trace_path;
  std::string svg_path{"trajectories.svg"};
  auto * plot_cmd = app.add_subcommand("plot", "Render a trace as a static SVG");
  plot_cmd->add_option("--trace,trace", trace_path, "trace.csv to render")->required();
  plot_cmd->add_option("--out", svg_path, "Output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (*run_cmd) {
    if (*seed_opt) { run.seed = run_seed; }
    if (*ctrl_opt) { run.controller = run_controller; }
    if (*agents_opt) { run.agents = run_agents; }
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*cmp_cmd) {
    cmp.timing = !no_timing;
    return cmd_compare(cmp, std::cout, std::cerr);
  }
  return cmd_plot(trace_path, svg_path, std::cerr);
}
