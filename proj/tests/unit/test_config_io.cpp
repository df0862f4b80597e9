#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "vocbf/config.hpp"
#include "vocbf/io.hpp"

using namespace vocbf;

namespace {

int error_line(std::string_view text)
{
  try {
    parse_config(text);
  } catch (const ConfigError & e) {
    return e.line();
  }
  return -1;
}

std::string error_field(std::string_view text)
{
  try {
    parse_config(text);
  } catch (const ConfigError & e) {
    return e.field();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsPerDynamics)
{
  const auto i = ScenarioConfig::defaults(DynamicsKind::integrator);
  EXPECT_EQ(i.k_vo, 1000.0);
  EXPECT_EQ(i.timestep_s, 0.01);
  EXPECT_EQ(i.simulation_time_s, 60.0);
  EXPECT_EQ(i.n_sampling_points, 250);
  const auto c = ScenarioConfig::defaults(DynamicsKind::car);
  EXPECT_EQ(c.k_vo, 1.0);
  EXPECT_EQ(c.max_acceleration_mps2, 3.0);
  EXPECT_EQ(c.max_steering_tan, 2.0);
  EXPECT_EQ(c.safety_margin_m, 0.1);
  EXPECT_EQ(c.braking_budget(), 3.0);
  EXPECT_NO_THROW(i.validate());
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesCommentsAndWhitespace)
{
  const auto cfg = parse_config("# header\n\n  n_agents = 8   # trailing\ncontroller=rvo\r\nseed = 42\n");
  EXPECT_EQ(cfg.n_agents, 8);
  EXPECT_EQ(cfg.controller, ControllerKind::rvo);
  EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, DynamicsSelectsDefaultsRegardlessOfOrder)
{
  const auto cfg = parse_config("k_vo = 5\ndynamics = car\n");
  EXPECT_EQ(cfg.dynamics, DynamicsKind::car);
  EXPECT_EQ(cfg.k_vo, 5.0);
  EXPECT_EQ(cfg.agent_radius_m, 1.0);
}

TEST(Config, RoundTrip)
{
  oracle::Rng rng(71);
  for (int k = 0; k < 200; ++k) {
    auto cfg = ScenarioConfig::defaults(k % 2 ? DynamicsKind::car : DynamicsKind::integrator);
    cfg.controller = static_cast<ControllerKind>(k % 5);
    cfg.n_agents = 1 + k % 12;
    cfg.seed = rng();
    cfg.noise_std_m = oracle::uniform(rng, 0.0, 1.0);
    cfg.circle_radius_m = oracle::uniform(rng, 1.0, 30.0);
    cfg.alpha_c = oracle::uniform(rng, 0.1, 30.0);
    cfg.safety_share = oracle::uniform(rng, 0.01, 1.0);
    cfg.k_tp = 1.0 / 3.0;
    const auto back = parse_config(serialize_config(cfg));
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(serialize_config(back), serialize_config(cfg));
  }
}

TEST(Config, ErrorsCarryLineAndField)
{
  EXPECT_EQ(error_line("n_agents = 2\ncontroller = magic\n"), 2);
  EXPECT_EQ(error_field("n_agents = 2\ncontroller = magic\n"), "controller");
  EXPECT_EQ(error_line("# c\n\nbogus_key = 1\n"), 3);
  EXPECT_EQ(error_field("# c\n\nbogus_key = 1\n"), "bogus_key");
  EXPECT_EQ(error_line("n_agents = 2\nseed\n"), 2);
  EXPECT_EQ(error_line("timestep_s = 0.01\ntimestep_s = 0.02\n"), 2);
  EXPECT_EQ(error_line("alpha_c = ten\n"), 1);
  EXPECT_EQ(error_line("alpha_c = 1e999\n"), 1);
  EXPECT_EQ(error_line("n_agents = 2.5\n"), 1);
  EXPECT_EQ(error_line("dynamics = boat\n"), 1);
  // a semantic check points at the offending line too
  EXPECT_EQ(error_line("seed = 1\nn_agents = 0\n"), 2);
  EXPECT_EQ(error_field("seed = 1\nn_agents = 0\n"), "n_agents");
  EXPECT_EQ(error_field("safety_share = 1.5\n"), "safety_share");
}

TEST(Config, MessageMentionsLineAndField)
{
  try {
    parse_config("n_agents = 2\ncontroller = magic\n");
    FAIL();
  } catch (const ConfigError & e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 2"), std::string::npos);
    EXPECT_NE(what.find("controller"), std::string::npos);
  }
}

TEST(Config, MissingFile)
{
  EXPECT_THROW(load_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST(FormatDouble, ShortestRoundTrip)
{
  EXPECT_EQ(format_double(0.01), "0.01");
  EXPECT_EQ(format_double(1000.0), "1000");
  oracle::Rng rng(72);
  for (int k = 0; k < 1000; ++k) {
    const double v = oracle::uniform(rng, -1e6, 1e6);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(TraceCsv, SeventeenDigitsRoundTrip)
{
  oracle::Rng rng(73);
  std::vector<TraceRow> trace;
  for (int k = 0; k < 50; ++k) {
    TraceRow r;
    r.t = 0.01 * k;
    r.agent_id = k % 3;
    r.p = oracle::uniform_vec(rng, -10, 10);
    r.v = oracle::uniform_vec(rng, -2, 2);
    r.u = oracle::uniform_vec(rng, -1, 1);
    r.has_car_state = k % 2 == 0;
    r.theta = r.has_car_state ? oracle::uniform(rng, -3, 3) : 0.0;
    r.speed = r.has_car_state ? oracle::uniform(rng, 0, 2) : 0.0;
    r.min_h_c = k == 0 ? kInf : oracle::uniform(rng, -1, 5);
    r.min_h_vo = oracle::uniform(rng, -3, 3);
    trace.push_back(r);
  }
  std::stringstream ss;
  write_trace_csv(ss, trace);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
  const auto back = read_trace_csv(ss);
  ASSERT_EQ(back.size(), trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    EXPECT_EQ(back[k].t, trace[k].t);
    EXPECT_EQ(back[k].agent_id, trace[k].agent_id);
    EXPECT_EQ(back[k].p, trace[k].p);
    EXPECT_EQ(back[k].v, trace[k].v);
    EXPECT_EQ(back[k].u, trace[k].u);
    EXPECT_EQ(back[k].has_car_state, trace[k].has_car_state);
    if (trace[k].has_car_state) {
      EXPECT_EQ(back[k].theta, trace[k].theta);
      EXPECT_EQ(back[k].speed, trace[k].speed);
    }
    EXPECT_EQ(back[k].min_h_c, trace[k].min_h_c);
    EXPECT_EQ(back[k].min_h_vo, trace[k].min_h_vo);
  }
}

TEST(TraceCsv, IntegratorLeavesCarColumnsBlank)
{
  TraceRow r;
  r.p = Vec2(1, 2);
  std::stringstream ss;
  write_trace_csv(ss, std::vector<TraceRow>{r});
  std::string header;
  std::string line;
  std::getline(ss, header);
  std::getline(ss, line);
  EXPECT_NE(line.find(",,,"), std::string::npos);
}

TEST(TraceCsv, Malformed)
{
  std::stringstream empty;
  EXPECT_THROW(read_trace_csv(empty), TraceFormatError);
  std::stringstream header_only(std::string(kTraceHeader) + "\n");
  EXPECT_THROW(read_trace_csv(header_only), TraceFormatError);
  std::stringstream wrong_header("a,b,c\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(wrong_header), TraceFormatError);
  std::stringstream short_row(std::string(kTraceHeader) + "\n0,0,1,2\n");
  EXPECT_THROW(read_trace_csv(short_row), TraceFormatError);
  std::stringstream bad_num(std::string(kTraceHeader) + "\n0,0,x,2,0,0,0,0,,,1,1\n");
  EXPECT_THROW(read_trace_csv(bad_num), TraceFormatError);
}

TEST(Svg, OnePolylinePerAgent)
{
  std::vector<TraceRow> trace;
  for (int k = 0; k < 10; ++k) {
    for (int a = 0; a < 3; ++a) {
      TraceRow r;
      r.t = 0.1 * k;
      r.agent_id = a;
      r.p = Vec2(k, a);
      trace.push_back(r);
    }
  }
  std::ostringstream os;
  EXPECT_EQ(write_svg_plot(os, trace), 3);
  const std::string svg = os.str();
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) { ++count; }
  EXPECT_EQ(count, 3u);
  std::ostringstream none;
  EXPECT_THROW(write_svg_plot(none, std::vector<TraceRow>{}), TraceFormatError);
}
