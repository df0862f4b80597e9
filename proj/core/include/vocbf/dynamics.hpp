#pragma once

#include "vocbf/geometry.hpp"

namespace vocbf {

/// Planar double integrator.
struct IntegratorState
{
  Vec2 p{Vec2::Zero()};
  Vec2 v{Vec2::Zero()};
};

/// Kinematic car with (tan(phi), a) as the control.
struct CarState
{
  Vec2 p{Vec2::Zero()};
  double theta{0.0};
  double v{0.0};

  Vec2 heading() const;
  Vec2 velocity() const { return v * heading(); }
};

struct CarControl
{
  double tan_phi{0.0};
  double accel{0.0};
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Scales v down to norm v_max if it is longer.
Vec2 clamp_norm(const Vec2 & v, double v_max);

/// Forward Euler; the new position uses the old velocity and the speed is norm-clamped.
IntegratorState integrator_step(const IntegratorState & s, const Vec2 & u, double dt, double v_max);

/// Forward Euler on (p, theta, v); speed clamped to [0, v_max].
CarState car_step(const CarState & s, const CarControl & u, double dt, double wheelbase, double v_max);

/// Cartesian acceleration of the car as a linear map of (tan(phi), a).
Mat2 car_accel_map(const CarState & s, double wheelbase);

}  // namespace vocbf
