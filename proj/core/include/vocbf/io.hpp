#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vocbf/simulation.hpp"

namespace vocbf {

class TraceFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char * kTraceHeader = "t,agent_id,px,py,vx,vy,ux,uy,theta,speed,min_h_c,min_h_vo";

/// 17 significant digits, locale independent.
std::string format_trace_double(double v);

void write_trace_csv(std::ostream & os, std::span<const TraceRow> trace);
std::vector<TraceRow> read_trace_csv(std::istream & is);

/// Per-episode metrics as a JSON document.
std::string metrics_json(const EpisodeResult & result);

/// Static SVG of per-agent trajectories. Returns the number of polylines drawn.
int write_svg_plot(std::ostream & os, std::span<const TraceRow> trace);

}  // namespace vocbf
