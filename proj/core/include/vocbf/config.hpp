#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vocbf {

enum class DynamicsKind { integrator, car };
enum class ControllerKind { ours, vo, rvo, hvo, ovvo };

std::string_view to_string(DynamicsKind k);
std::string_view to_string(ControllerKind k);
std::optional<DynamicsKind> parse_dynamics(std::string_view s);
std::optional<ControllerKind> parse_controller(std::string_view s);

/// Configuration problem; line is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(int line, std::string field, const std::string & message);

  int line() const { return line_; }
  const std::string & field() const { return field_; }
  const std::string & message() const { return message_; }

private:
  int line_;
  std::string field_;
  std::string message_;
};

/**
 * @brief Everything needed to run one benchmark episode.
 *
 * Field names follow the simulation parameter table; defaults() fills the
 * values for the chosen dynamics.
 */
struct ScenarioConfig
{
  // scenario
  int n_agents{2};
  DynamicsKind dynamics{DynamicsKind::integrator};
  ControllerKind controller{ControllerKind::ours};
  double circle_radius_m{7.0};
  double noise_std_m{0.05};
  std::uint64_t seed{0};
  double timestep_s{0.01};
  double simulation_time_s{60.0};

  // CBF / QP
  double alpha_vo{10.0};
  double alpha_c{10.0};
  double k_u{1.0};
  double k_vo{1000.0};
  double safety_margin_m{0.05};
  double safety_tightening_m{0.02};  ///< extra margin used only inside the braking rows
  double safety_share{0.5};  ///< fraction of each pair's barrier margin one agent may consume
  double max_vo_weight{1e3};
  int input_polygon_sides{16};

  // limits
  double preferred_velocity_mps{1.0};
  double max_velocity_mps{2.0};
  double max_acceleration_mps2{1.0};
  double max_steering_tan{2.0};
  double wheelbase_m{1.0};

  // geometry and termination
  double geometric_tolerance{0.1};
  double goal_tolerance_m{0.5};
  double agent_radius_m{0.5};

  // reference control
  double p_coefficient{1.0};
  double d_coefficient{0.5};
  double car_speed_gain{1.0};
  double car_steering_gain{1.0};

  // sampling baselines
  int n_sampling_points{250};
  double k_tp{2.0};
  double k_vd{1.0};
  double c1{1.0};
  double c2{1.0};
  double hvo_infeasible_limit_s{1.0};

  static ScenarioConfig defaults(DynamicsKind dynamics);

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  /// Radius of the input polygon's inscribed circle (integrator) or a_max (car).
  double braking_budget() const;

  bool operator==(const ScenarioConfig &) const = default;
};

/// Ordered key/value view of a config, as written to disk.
std::vector<std::pair<std::string, std::string>> to_key_values(const ScenarioConfig & cfg);

/// Serializes to the `key = value` text format.
std::string serialize_config(const ScenarioConfig & cfg);

/**
 * Parses `key = value` lines; `#` starts a comment. Unspecified keys take
 * the defaults of the configured dynamics. Throws ConfigError with the
 * offending line number and key.
 */
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::string & path);

/// Applies one key/value override, as a config line would.
void apply_override(ScenarioConfig & cfg, std::string_view key, std::string_view value, int line = 0);

/// Lossless shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace vocbf
