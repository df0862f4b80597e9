#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vocbf::cli {

inline constexpr const char * kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsageError = 2, kRuntimeError = 3 };

struct RunOptions
{
  std::string config_path;
  std::string out_dir{"."};
  std::optional<unsigned long long> seed;
  std::optional<std::string> controller;
  std::optional<int> agents;
};

/// Writes trace.csv, metrics.json and manifest.json to out_dir.
int cmd_run(const RunOptions & opts, std::ostream & log, std::ostream & err);

struct CompareOptions
{
  std::string config_path;
  std::string out_dir{"."};
  std::vector<std::string> controllers{"ours"};
  std::vector<int> agents;  ///< empty: the config's n_agents
  int seeds{10};
  bool timing{true};        ///< false leaves the solve-time columns empty
  int threads{0};           ///< 0: NAV_THREADS or hardware concurrency
};

/// Writes table.csv with one row per (n_agents, controller) cell.
int cmd_compare(const CompareOptions & opts, std::ostream & log, std::ostream & err);

/// Renders a trace as a static SVG.
int cmd_plot(const std::string & trace_path, const std::string & out_svg, std::ostream & err);

/// Worker count honoring the NAV_THREADS cap.
int resolve_threads(int requested);

}  // namespace vocbf::cli
