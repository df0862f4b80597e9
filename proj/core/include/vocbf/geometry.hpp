#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace vocbf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when two agents share a center, so no direction between them exists.
class DegeneratePairError : public std::domain_error
{
public:
  explicit DegeneratePairError(const std::string & what) : std::domain_error(what) {}
};

/// Position, velocity and radius of one disc-shaped body.
struct DiscState
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
  double radius{0.0};
};

/**
 * @brief Relative state of obstacle j as seen from agent i.
 *
 * Agents are discs, so the velocity obstacle of j is the cone of relative
 * velocities hitting a disc of radius r_comb centered at p_rel.
 */
struct PairGeometry
{
  Vec2 p_rel{Vec2::Zero()};  ///< p_j - p_i
  Vec2 v_rel{Vec2::Zero()};  ///< v_j - v_i
  double r_comb{0.0};        ///< r_i + r_j
  double dist{0.0};          ///< |p_rel|

  static PairGeometry make(const Vec2 & p_i, const Vec2 & v_i, double r_i,
                           const Vec2 & p_j, const Vec2 & v_j, double r_j);
  static PairGeometry make(const Vec2 & p_rel, const Vec2 & v_rel, double r_comb);
  static PairGeometry make(const DiscState & i, const DiscState & j);

  bool overlapping() const { return dist <= r_comb; }
};

/// Value of the cone CBF with its time derivative split as hdot = grad_u . u_rel + drift.
struct ConeCbfValue
{
  double h{0.0};
  Vec2 grad_u{Vec2::Zero()};
  double drift{0.0};

  double hdot(const Vec2 & u_rel) const { return grad_u.dot(u_rel) + drift; }
};

/// Speeds below this are treated as zero in the cone derivative.
inline constexpr double kVelocityEpsilon = 1e-6;

/// Upper bound on the inverse time-to-collision weight.
inline constexpr double kMaxVoWeight = 1e3;

/// Cosine of the cone half-angle; 0 when the discs overlap.
double cone_cos(const PairGeometry & pair);

/// Cone CBF: nonnegative iff the relative velocity does not lead into the disc.
double h_vo(const PairGeometry & pair);

/// h_vo together with the control-linear decomposition of its time derivative.
ConeCbfValue h_vo_dot_terms(const PairGeometry & pair);

/**
 * Smallest t >= 0 with |p_rel + t v_rel| = r_comb under constant velocities.
 * Returns 0 when the discs already touch or overlap and +inf when they never meet.
 */
double time_to_collision(const PairGeometry & pair);

/// Inverse time-to-collision, zero for no predicted collision, capped at kMaxVoWeight.
double vo_weight(double t_col, double w_max = kMaxVoWeight);

}  // namespace vocbf
