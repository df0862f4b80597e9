#include "vocbf/geometry.hpp"

#include <cmath>

namespace vocbf {

namespace {

void require_nondegenerate(const PairGeometry & pair)
{
  if (!(pair.dist > 0.0)) { throw DegeneratePairError("agent centers coincide"); }
}

// sqrt(|p|^2 - r^2): distance from the apex to the tangent points.
double tangent_length(const PairGeometry & pair)
{
  const double d2 = pair.dist * pair.dist - pair.r_comb * pair.r_comb;
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

}  // namespace

PairGeometry PairGeometry::make(const Vec2 & p_i, const Vec2 & v_i, double r_i,
                                const Vec2 & p_j, const Vec2 & v_j, double r_j)
{
  return make(p_j - p_i, v_j - v_i, r_i + r_j);
}

PairGeometry PairGeometry::make(const Vec2 & p_rel, const Vec2 & v_rel, double r_comb)
{
  if (!(r_comb >= 0.0)) { throw std::invalid_argument("combined radius must be nonnegative"); }
  PairGeometry g;
  g.p_rel = p_rel;
  g.v_rel = v_rel;
  g.r_comb = r_comb;
  g.dist = p_rel.norm();
  return g;
}

PairGeometry PairGeometry::make(const DiscState & i, const DiscState & j)
{
  return make(j.position - i.position, j.velocity - i.velocity, i.radius + j.radius);
}

double cone_cos(const PairGeometry & pair)
{
  require_nondegenerate(pair);
  if (pair.overlapping()) { return 0.0; }
  return tangent_length(pair) / pair.dist;
}

double h_vo(const PairGeometry & pair)
{
  require_nondegenerate(pair);
  // |p| cos(gamma) == tangent length for discs
  return pair.p_rel.dot(pair.v_rel) + pair.v_rel.norm() * tangent_length(pair);
}

ConeCbfValue h_vo_dot_terms(const PairGeometry & pair)
{
  require_nondegenerate(pair);
  const Vec2 & p = pair.p_rel;
  const Vec2 & v = pair.v_rel;
  const double speed = v.norm();
  const double s = tangent_length(pair);

  ConeCbfValue out;
  out.h = p.dot(v) + speed * s;

  // d/dt (p.v) = |v|^2 + p.u
  out.grad_u = p;
  out.drift = speed * speed;
  if (speed <= kVelocityEpsilon || pair.overlapping()) { return out; }

  // d/dt (|v| s) = (v_hat . u) s + |v| (p.v) / s
  out.grad_u += (s / speed) * v;
  if (s > 0.0) { out.drift += speed * p.dot(v) / s; }
  return out;
}

double time_to_collision(const PairGeometry & pair)
{
  const Vec2 & p = pair.p_rel;
  const Vec2 & v = pair.v_rel;
  const double c = p.squaredNorm() - pair.r_comb * pair.r_comb;
  if (c <= 0.0) { return 0.0; }

  const double a = v.squaredNorm();
  const double half_b = p.dot(v);
  if (a == 0.0 || half_b >= 0.0) { return kInf; }

  const double disc = half_b * half_b - a * c;
  if (disc < 0.0) { return kInf; }
  // smaller root, written to avoid cancellation
  return c / (-half_b + std::sqrt(disc));
}

double vo_weight(double t_col, double w_max)
{
  if (std::isinf(t_col)) { return 0.0; }
  if (t_col * w_max <= 1.0) { return w_max; }
  return 1.0 / t_col;
}

}  // namespace vocbf
