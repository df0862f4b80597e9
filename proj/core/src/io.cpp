#include "vocbf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace vocbf {

std::string format_trace_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream & os, std::span<const TraceRow> trace)
{
  os << kTraceHeader << '\n';
  const auto f = format_trace_double;
  for (const auto & r : trace) {
    os << f(r.t) << ',' << r.agent_id << ',' << f(r.p.x()) << ',' << f(r.p.y()) << ',' << f(r.v.x()) << ','
       << f(r.v.y()) << ',' << f(r.u.x()) << ',' << f(r.u.y()) << ',';
    if (r.has_car_state) { os << f(r.theta) << ',' << f(r.speed); } else { os << ','; }
    os << ',' << f(r.min_h_c) << ',' << f(r.min_h_vo) << '\n';
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto c = line.find(',', pos);
    out.push_back(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
    if (c == std::string_view::npos) { break; }
    pos = c + 1;
  }
  return out;
}

template<typename T>
T parse_field(std::string_view s, int line_no, const char * name)
{
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw TraceFormatError("trace line " + std::to_string(line_no) + ": bad " + name + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line)) { throw TraceFormatError("trace is empty"); }
  if (!line.empty() && line.back() == '\r') { line.pop_back(); }
  if (line != kTraceHeader) { throw TraceFormatError("unexpected trace header"); }

  std::vector<TraceRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    if (line.empty()) { continue; }
    const auto cols = split(line);
    if (cols.size() != 12) {
      throw TraceFormatError("trace line " + std::to_string(line_no) + ": expected 12 columns");
    }
    TraceRow r;
    r.t = parse_field<double>(cols[0], line_no, "t");
    r.agent_id = parse_field<int>(cols[1], line_no, "agent_id");
    r.p = {parse_field<double>(cols[2], line_no, "px"), parse_field<double>(cols[3], line_no, "py")};
    r.v = {parse_field<double>(cols[4], line_no, "vx"), parse_field<double>(cols[5], line_no, "vy")};
    r.u = {parse_field<double>(cols[6], line_no, "ux"), parse_field<double>(cols[7], line_no, "uy")};
    r.has_car_state = !cols[8].empty();
    if (r.has_car_state) {
      r.theta = parse_field<double>(cols[8], line_no, "theta");
      r.speed = parse_field<double>(cols[9], line_no, "speed");
    }
    r.min_h_c = parse_field<double>(cols[10], line_no, "min_h_c");
    r.min_h_vo = parse_field<double>(cols[11], line_no, "min_h_vo");
    rows.push_back(r);
  }
  if (rows.empty()) { throw TraceFormatError("trace has no rows"); }
  return rows;
}

std::string metrics_json(const EpisodeResult & r)
{
  using nlohmann::json;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["controller"] = std::string(to_string(r.config.controller));
  j["dynamics"] = std::string(to_string(r.config.dynamics));
  j["n_agents"] = r.config.n_agents;
  j["seed"] = r.config.seed;
  j["collisions"] = r.collisions;
  j["all_succeeded"] = r.all_succeeded;
  json success = json::array();
  json arrival = json::array();
  for (std::size_t i = 0; i < r.success.size(); ++i) {
    success.push_back(r.success[i] != 0);
    arrival.push_back(finite_or_null(r.arrival_time[i]));
  }
  j["success"] = success;
  j["arrival_time_s"] = arrival;
  j["completion_time_s"] = r.completion_time;
  j["end_time_s"] = r.end_time;
  j["terminated_early"] = r.terminated_early;
  j["infeasible_steps"] = r.infeasible_steps;
  j["fallback_steps"] = r.fallback_steps;
  j["min_h_c"] = finite_or_null(r.min_h_c);
  j["qp_solves"] = r.qp_solves;
  j["slack_checks"] = r.slack_checks;
  j["max_slack_residual"] = r.max_slack_residual;
  j["mean_solve_ms"] = r.mean_solve_ms();
  return j.dump(2) + "\n";
}

namespace {

std::string color_for(int k, int n)
{
  const double hue = 360.0 * k / std::max(1, n);
  std::ostringstream ss;
  ss << "hsl(" << static_cast<int>(hue) << ",70%,45%)";
  return ss.str();
}

double nice_length(double span)
{
  const double target = 0.2 * span;
  const double base = std::pow(10.0, std::floor(std::log10(target)));
  for (double m : {5.0, 2.0, 1.0}) {
    if (m * base <= target) { return m * base; }
  }
  return base;
}

}  // namespace

int write_svg_plot(std::ostream & os, std::span<const TraceRow> trace)
{
  if (trace.empty()) { throw TraceFormatError("trace has no rows"); }
  std::map<int, std::vector<Vec2>> paths;
  double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
  for (const auto & r : trace) {
    paths[r.agent_id].push_back(r.p);
    x0 = std::min(x0, r.p.x());
    x1 = std::max(x1, r.p.x());
    y0 = std::min(y0, r.p.y());
    y1 = std::max(y1, r.p.y());
  }
  const double span = std::max({x1 - x0, y1 - y0, 1.0});
  const double margin = 0.1 * span;
  x0 -= margin;
  y0 -= margin;
  x1 += margin;
  y1 += margin;
  const double size_px = 800.0;
  const double scale = size_px / std::max(x1 - x0, y1 - y0);  // one scale for both axes
  const double w = (x1 - x0) * scale;
  const double h = (y1 - y0) * scale;
  auto px = [&](const Vec2 & p) { return Vec2((p.x() - x0) * scale, (y1 - p.y()) * scale); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const int n = static_cast<int>(paths.size());
  int k = 0;
  for (const auto & [id, pts] : paths) {
    const std::string color = color_for(k++, n);
    os << "<polyline class=\"trajectory\" data-agent=\"" << id << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 q = px(pts[i]);
      os << (i ? " " : "") << q.x() << ',' << q.y();
    }
    os << "\"/>\n";
    const Vec2 s = px(pts.front());
    const Vec2 e = px(pts.back());
    os << "<circle class=\"start\" cx=\"" << s.x() << "\" cy=\"" << s.y() << "\" r=\"5\" fill=\"" << color << "\"/>\n";
    os << "<rect class=\"end\" x=\"" << e.x() - 5 << "\" y=\"" << e.y() - 5 << "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\""
       << color << "\" stroke-width=\"2\"/>\n";
  }

  // scale bar, bottom left
  const double bar = nice_length(x1 - x0);
  const double bx = 20.0;
  const double by = h - 20.0;
  os << "<line class=\"scale-bar\" x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx + bar * scale << "\" y2=\"" << by
     << "\" stroke=\"black\" stroke-width=\"3\"/>\n";
  os << "<text x=\"" << bx << "\" y=\"" << by - 8 << "\" font-family=\"sans-serif\" font-size=\"14\">" << bar
     << " m</text>\n";
  os << "</svg>\n";
  return n;
}

}  // namespace vocbf
