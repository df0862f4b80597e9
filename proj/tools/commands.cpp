#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vocbf/config.hpp"
#include "vocbf/io.hpp"
#include "vocbf/simulation.hpp"

namespace fs = std::filesystem;

namespace vocbf::cli {

namespace {

std::string utc_timestamp()
{
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_file(const fs::path & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw std::runtime_error("cannot write " + path.string()); }
  out << content;
  if (!out) { throw std::runtime_error("failed writing " + path.string()); }
}

nlohmann::json config_json(const ScenarioConfig & cfg)
{
  nlohmann::json j = nlohmann::json::object();
  for (const auto & [k, v] : to_key_values(cfg)) { j[k] = v; }
  return j;
}

}  // namespace

int resolve_threads(int requested)
{
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char * env = std::getenv("NAV_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) { n = std::min(n, cap); }
  }
  return std::max(1, n);
}

int cmd_run(const RunOptions & opts, std::ostream & log, std::ostream & err)
{
  const auto started = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  try {
    cfg = load_config(opts.config_path);
    if (opts.seed) { cfg.seed = *opts.seed; }
    if (opts.controller) { apply_override(cfg, "controller", *opts.controller); }
    if (opts.agents) { cfg.n_agents = *opts.agents; }
    cfg.validate();
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);
    const EpisodeResult res = run_episode(cfg);

    const fs::path trace_path = out_dir / "trace.csv";
    const fs::path metrics_path = out_dir / "metrics.json";
    const fs::path manifest_path = out_dir / "manifest.json";
    {
      std::ofstream out(trace_path, std::ios::binary);
      if (!out) { throw std::runtime_error("cannot write " + trace_path.string()); }
      write_trace_csv(out, res.trace);
    }
    write_file(metrics_path, metrics_json(res));

    nlohmann::json manifest;
    manifest["tool"] = "vocbf";
    manifest["version"] = kToolVersion;
    manifest["command"] = "run";
    manifest["config_path"] = opts.config_path;
    manifest["config"] = config_json(cfg);
    manifest["artifacts"] = {trace_path.string(), metrics_path.string(), manifest_path.string()};
    manifest["started_utc"] = utc_timestamp();
    manifest["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_file(manifest_path, manifest.dump(2) + "\n");

    log << to_string(cfg.controller) << " n=" << cfg.n_agents << " seed=" << cfg.seed << ": collisions=" << res.collisions
        << " success=" << (res.all_succeeded ? "yes" : "no") << " completion=" << res.completion_time << " s\n";
    return kOk;
  } catch (const std::exception & e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

int cmd_compare(const CompareOptions & opts, std::ostream & log, std::ostream & err)
{
  ScenarioConfig base;
  std::vector<ControllerKind> controllers;
  try {
    base = load_config(opts.config_path);
    for (const auto & name : opts.controllers) {
      const auto c = parse_controller(name);
      if (!c) { throw ConfigError(0, "controller", "unknown controller '" + name + "'"); }
      controllers.push_back(*c);
    }
    if (opts.seeds < 1) { throw ConfigError(0, "seeds", "must be at least 1"); }
    for (int n : opts.agents) {
      if (n < 1) { throw ConfigError(0, "agents", "must be at least 1"); }
    }
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  }

  const std::vector<int> agent_counts = opts.agents.empty() ? std::vector<int>{base.n_agents} : opts.agents;

  struct Cell
  {
    int n_agents;
    ControllerKind controller;
  };
  std::vector<Cell> cells;
  std::vector<ScenarioConfig> jobs;
  for (int n : agent_counts) {
    for (auto c : controllers) {
      cells.push_back({n, c});
      for (int s = 0; s < opts.seeds; ++s) {
        ScenarioConfig cfg = base;
        cfg.n_agents = n;
        cfg.controller = c;
        cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        jobs.push_back(cfg);
      }
    }
  }

  try {
    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);

    std::vector<EpisodeResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < jobs.size(); k = next++) {
        results[k] = run_episode(jobs[k]);
        results[k].trace.clear();
        results[k].trace.shrink_to_fit();
      }
    };
    const int n_threads = std::min<int>(resolve_threads(opts.threads), static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) { pool.emplace_back(worker); }
    worker();
    for (auto & th : pool) { th.join(); }

    std::ostringstream table;
    table << "n_agents,controller,success_rate,collisions_mean,collisions_std,completion_mean_s,completion_std_s,"
             "solve_ms_mean,solve_ms_std\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::span<const EpisodeResult> cell(results.data() + c * opts.seeds, static_cast<std::size_t>(opts.seeds));
      const auto st = aggregate(cell);
      table << cells[c].n_agents << ',' << to_string(cells[c].controller) << ',' << format_double(st.success_rate) << ','
            << format_double(st.collisions.mean) << ',' << format_double(st.collisions.std) << ','
            << format_double(st.completion_time.mean) << ',' << format_double(st.completion_time.std) << ',';
      if (opts.timing) {
        table << format_double(st.solve_ms.mean) << ',' << format_double(st.solve_ms.std);
      } else {
        table << ',';
      }
      table << '\n';
      log << std::setw(3) << cells[c].n_agents << ' ' << std::setw(5) << to_string(cells[c].controller)
          << "  S.R. " << st.success_rate << "  collisions " << st.collisions.mean << " +- " << st.collisions.std
          << "  time " << st.completion_time.mean << " +- " << st.completion_time.std << " s\n";
    }
    write_file(out_dir / "table.csv", table.str());
    return kOk;
  } catch (const std::exception & e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

int cmd_plot(const std::string & trace_path, const std::string & out_svg, std::ostream & err)
{
  std::vector<TraceRow> trace;
  try {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) { throw TraceFormatError("cannot read trace '" + trace_path + "'"); }
    trace = read_trace_csv(in);
  } catch (const TraceFormatError & e) {
    err << "trace error: " << e.what() << '\n';
    return kUsageError;
  }
  try {
    std::ofstream out(out_svg, std::ios::binary);
    if (!out) { throw std::runtime_error("cannot write " + out_svg); }
    write_svg_plot(out, trace);
    return kOk;
  } catch (const std::exception & e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace vocbf::cli
