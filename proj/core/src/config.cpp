#include "vocbf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <variant>

namespace vocbf {

std::string_view to_string(DynamicsKind k)
{
  return k == DynamicsKind::car ? "car" : "integrator";
}

std::string_view to_string(ControllerKind k)
{
  switch (k) {
  case ControllerKind::ours: return "ours";
  case ControllerKind::vo: return "vo";
  case ControllerKind::rvo: return "rvo";
  case ControllerKind::hvo: return "hvo";
  case ControllerKind::ovvo: return "ovvo";
  }
  return "ours";
}

std::optional<DynamicsKind> parse_dynamics(std::string_view s)
{
  if (s == "integrator") { return DynamicsKind::integrator; }
  if (s == "car") { return DynamicsKind::car; }
  return std::nullopt;
}

std::optional<ControllerKind> parse_controller(std::string_view s)
{
  for (auto k : {ControllerKind::ours, ControllerKind::vo, ControllerKind::rvo, ControllerKind::hvo, ControllerKind::ovvo}) {
    if (s == to_string(k)) { return k; }
  }
  return std::nullopt;
}

namespace {

std::string describe(int line, const std::string & field, const std::string & message)
{
  std::string out;
  if (line > 0) { out += "line " + std::to_string(line) + ": "; }
  if (!field.empty()) { out += "'" + field + "': "; }
  return out + message;
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string & message)
    : std::runtime_error(describe(line, field, message)), line_(line), field_(std::move(field)), message_(message)
{}

ScenarioConfig ScenarioConfig::defaults(DynamicsKind dynamics)
{
  ScenarioConfig c;
  c.dynamics = dynamics;
  if (dynamics == DynamicsKind::car) {
    c.k_vo = 1.0;
    c.max_velocity_mps = 10.0;
    c.max_acceleration_mps2 = 3.0;
    c.goal_tolerance_m = 1.0;
    c.agent_radius_m = 1.0;
    c.p_coefficient = 0.2;
    c.circle_radius_m = 20.0;
    c.safety_margin_m = 0.1;
    c.preferred_velocity_mps = 10.0;
  }
  return c;
}

double ScenarioConfig::braking_budget() const
{
  if (dynamics == DynamicsKind::car) { return max_acceleration_mps2; }
  return max_acceleration_mps2 * std::cos(std::numbers::pi / input_polygon_sides);
}

void ScenarioConfig::validate() const
{
  auto need = [](bool ok, const char * field, const char * msg) {
    if (!ok) { throw ConfigError(0, field, msg); }
  };
  need(n_agents >= 1, "n_agents", "must be at least 1");
  need(timestep_s > 0.0, "timestep_s", "must be positive");
  need(simulation_time_s >= timestep_s, "simulation_time_s", "must be at least one timestep");
  need(circle_radius_m > 0.0, "circle_radius_m", "must be positive");
  need(noise_std_m >= 0.0, "noise_std_m", "must be nonnegative");
  need(alpha_vo > 0.0, "alpha_vo", "must be positive");
  need(alpha_c > 0.0, "alpha_c", "must be positive");
  need(k_u > 0.0, "k_u", "must be positive");
  need(k_vo > 0.0, "k_vo", "must be positive");
  need(safety_margin_m >= 0.0, "safety_margin_m", "must be nonnegative");
  need(safety_tightening_m >= 0.0, "safety_tightening_m", "must be nonnegative");
  need(safety_share > 0.0 && safety_share <= 1.0, "safety_share", "must lie in (0, 1]");
  need(max_vo_weight > 0.0, "max_vo_weight", "must be positive");
  need(input_polygon_sides >= 3, "input_polygon_sides", "must be at least 3");
  need(preferred_velocity_mps > 0.0, "preferred_velocity_mps", "must be positive");
  need(max_velocity_mps > 0.0, "max_velocity_mps", "must be positive");
  need(max_acceleration_mps2 > 0.0, "max_acceleration_mps2", "must be positive");
  need(max_steering_tan > 0.0, "max_steering_tan", "must be positive");
  need(wheelbase_m > 0.0, "wheelbase_m", "must be positive");
  need(geometric_tolerance >= 0.0 && geometric_tolerance < 1.0, "geometric_tolerance", "must lie in [0, 1)");
  need(goal_tolerance_m > 0.0, "goal_tolerance_m", "must be positive");
  need(agent_radius_m > 0.0, "agent_radius_m", "must be positive");
  need(p_coefficient > 0.0, "p_coefficient", "must be positive");
  need(d_coefficient >= 0.0, "d_coefficient", "must be nonnegative");
  need(car_speed_gain > 0.0, "car_speed_gain", "must be positive");
  need(car_steering_gain > 0.0, "car_steering_gain", "must be positive");
  need(n_sampling_points >= 1, "n_sampling_points", "must be at least 1");
  need(c1 >= 0.0 && c2 >= 0.0, "c1", "exponents must be nonnegative");
  need(hvo_infeasible_limit_s >= 0.0, "hvo_infeasible_limit_s", "must be nonnegative");
}

std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

using Field = std::variant<double ScenarioConfig::*, int ScenarioConfig::*, std::uint64_t ScenarioConfig::*>;

struct FieldSpec
{
  const char * key;
  Field member;
};

// order is the serialized order
const std::vector<FieldSpec> & numeric_fields()
{
  static const std::vector<FieldSpec> fields = {
    {"n_agents", &ScenarioConfig::n_agents},
    {"circle_radius_m", &ScenarioConfig::circle_radius_m},
    {"noise_std_m", &ScenarioConfig::noise_std_m},
    {"seed", &ScenarioConfig::seed},
    {"timestep_s", &ScenarioConfig::timestep_s},
    {"simulation_time_s", &ScenarioConfig::simulation_time_s},
    {"alpha_vo", &ScenarioConfig::alpha_vo},
    {"alpha_c", &ScenarioConfig::alpha_c},
    {"k_u", &ScenarioConfig::k_u},
    {"k_vo", &ScenarioConfig::k_vo},
    {"safety_margin_m", &ScenarioConfig::safety_margin_m},
    {"safety_tightening_m", &ScenarioConfig::safety_tightening_m},
    {"safety_share", &ScenarioConfig::safety_share},
    {"max_vo_weight", &ScenarioConfig::max_vo_weight},
    {"input_polygon_sides", &ScenarioConfig::input_polygon_sides},
    {"preferred_velocity_mps", &ScenarioConfig::preferred_velocity_mps},
    {"max_velocity_mps", &ScenarioConfig::max_velocity_mps},
    {"max_acceleration_mps2", &ScenarioConfig::max_acceleration_mps2},
    {"max_steering_tan", &ScenarioConfig::max_steering_tan},
    {"wheelbase_m", &ScenarioConfig::wheelbase_m},
    {"geometric_tolerance", &ScenarioConfig::geometric_tolerance},
    {"goal_tolerance_m", &ScenarioConfig::goal_tolerance_m},
    {"agent_radius_m", &ScenarioConfig::agent_radius_m},
    {"p_coefficient", &ScenarioConfig::p_coefficient},
    {"d_coefficient", &ScenarioConfig::d_coefficient},
    {"car_speed_gain", &ScenarioConfig::car_speed_gain},
    {"car_steering_gain", &ScenarioConfig::car_steering_gain},
    {"n_sampling_points", &ScenarioConfig::n_sampling_points},
    {"k_tp", &ScenarioConfig::k_tp},
    {"k_vd", &ScenarioConfig::k_vd},
    {"c1", &ScenarioConfig::c1},
    {"c2", &ScenarioConfig::c2},
    {"hvo_infeasible_limit_s", &ScenarioConfig::hvo_infeasible_limit_s},
  };
  return fields;
}

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) { return {}; }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template<typename T>
T parse_number(std::string_view value, std::string_view key, int line)
{
  T out{};
  const auto * end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(line, std::string(key), "invalid number '" + std::string(value) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) { throw ConfigError(line, std::string(key), "value must be finite"); }
  }
  return out;
}

}  // namespace

void apply_override(ScenarioConfig & cfg, std::string_view key, std::string_view value, int line)
{
  if (key == "dynamics") {
    const auto d = parse_dynamics(value);
    if (!d) { throw ConfigError(line, "dynamics", "unknown dynamics '" + std::string(value) + "' (expected integrator or car)"); }
    cfg.dynamics = *d;
    return;
  }
  if (key == "controller") {
    const auto c = parse_controller(value);
    if (!c) {
      throw ConfigError(line, "controller", "unknown controller '" + std::string(value) + "' (expected ours, vo, rvo, hvo or ovvo)");
    }
    cfg.controller = *c;
    return;
  }
  for (const auto & spec : numeric_fields()) {
    if (key != spec.key) { continue; }
    std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        cfg.*member = parse_number<T>(value, key, line);
      },
      spec.member);
    return;
  }
  throw ConfigError(line, std::string(key), "unknown key");
}

std::vector<std::pair<std::string, std::string>> to_key_values(const ScenarioConfig & cfg)
{
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("dynamics", std::string(to_string(cfg.dynamics)));
  out.emplace_back("controller", std::string(to_string(cfg.controller)));
  for (const auto & spec : numeric_fields()) {
    std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_floating_point_v<T>) {
          out.emplace_back(spec.key, format_double(cfg.*member));
        } else {
          out.emplace_back(spec.key, std::to_string(cfg.*member));
        }
      },
      spec.member);
  }
  return out;
}

std::string serialize_config(const ScenarioConfig & cfg)
{
  std::string out;
  for (const auto & [k, v] : to_key_values(cfg)) { out += k + " = " + v + "\n"; }
  return out;
}

ScenarioConfig parse_config(std::string_view text)
{
  struct Entry
  {
    int line;
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) { line = line.substr(0, hash); }
    line = trim(line);
    if (line.empty()) { continue; }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) { throw ConfigError(line_no, "", "expected 'key = value'"); }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) { throw ConfigError(line_no, "", "missing key"); }
    if (value.empty()) { throw ConfigError(line_no, std::string(key), "missing value"); }
    const bool dup = std::any_of(entries.begin(), entries.end(), [&](const Entry & e) { return e.key == key; });
    if (dup) { throw ConfigError(line_no, std::string(key), "duplicate key"); }
    entries.push_back({line_no, std::string(key), std::string(value)});
  }

  // dynamics selects the defaults the remaining keys override
  DynamicsKind dynamics = DynamicsKind::integrator;
  for (const auto & e : entries) {
    if (e.key == "dynamics") {
      const auto d = parse_dynamics(e.value);
      if (!d) { throw ConfigError(e.line, "dynamics", "unknown dynamics '" + e.value + "' (expected integrator or car)"); }
      dynamics = *d;
    }
  }
  ScenarioConfig cfg = ScenarioConfig::defaults(dynamics);
  for (const auto & e : entries) { apply_override(cfg, e.key, e.value, e.line); }

  try {
    cfg.validate();
  } catch (const ConfigError & err) {
    int line = 0;
    for (const auto & e : entries) {
      if (e.key == err.field()) { line = e.line; }
    }
    if (line > 0) { throw ConfigError(line, err.field(), err.message()); }
    throw;
  }
  return cfg;
}

ScenarioConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError(0, "", "cannot read config file '" + path + "'"); }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vocbf
