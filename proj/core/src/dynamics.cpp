#include "vocbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vocbf {

Vec2 CarState::heading() const { return {std::cos(theta), std::sin(theta)}; }

double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) { a += two_pi; }
  return a;
}

Vec2 clamp_norm(const Vec2 & v, double v_max)
{
  const double n = v.norm();
  if (n <= v_max || n == 0.0) { return v; }
  return v * (v_max / n);
}

IntegratorState integrator_step(const IntegratorState & s, const Vec2 & u, double dt, double v_max)
{
  if (!(dt > 0.0)) { throw std::invalid_argument("dt must be positive"); }
  IntegratorState out;
  out.p = s.p + dt * s.v;
  out.v = clamp_norm(s.v + dt * u, v_max);
  return out;
}

CarState car_step(const CarState & s, const CarControl & u, double dt, double wheelbase, double v_max)
{
  if (!(dt > 0.0)) { throw std::invalid_argument("dt must be positive"); }
  CarState out;
  out.p = s.p + dt * s.velocity();
  out.theta = wrap_angle(s.theta + dt * s.v / wheelbase * u.tan_phi);
  out.v = std::clamp(s.v + dt * u.accel, 0.0, v_max);
  return out;
}

Mat2 car_accel_map(const CarState & s, double wheelbase)
{
  // d/dt [v cos(theta), v sin(theta)] with theta_dot = v tan(phi) / L, v_dot = a
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double k = s.v * s.v / wheelbase;
  Mat2 m;
  m << -k * sn, c,
        k * c,  sn;
  return m;
}

}  // namespace vocbf
