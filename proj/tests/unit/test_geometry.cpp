#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vocbf/geometry.hpp"

using namespace vocbf;

namespace {

PairGeometry pair(Vec2 p, Vec2 v, double r) { return PairGeometry::make(p, v, r); }

}  // namespace

TEST(ConeCos, Examples)
{
  EXPECT_NEAR(cone_cos(pair({2, 0}, {0, 0}, 1)), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_EQ(cone_cos(pair({2, 0}, {0, 0}, 2)), 0.0);
  EXPECT_EQ(cone_cos(pair({10, 0}, {0, 0}, 0)), 1.0);
}

TEST(ConeCos, TangentLineConstruction)
{
  // tangent from the origin to the unit disc at (2, 0) touches at (3/2, sqrt(3)/2)
  const Vec2 touch(1.5, std::sqrt(3.0) / 2.0);
  EXPECT_NEAR((touch - Vec2(2, 0)).norm(), 1.0, 1e-15);
  EXPECT_NEAR(touch.dot(Vec2(2, 0) - touch), 0.0, 1e-15);
  EXPECT_NEAR(cone_cos(pair({2, 0}, {0, 0}, 1)), touch.dot(Vec2(1, 0)) / touch.norm(), 1e-15);
}

TEST(ConeCos, MonotoneInDistance)
{
  double prev = -1.0;
  for (double d = 1.0; d < 50.0; d += 0.01) {
    const double c = cone_cos(pair({d, 0}, {0, 0}, 1.0));
    EXPECT_GE(c, prev);
    EXPECT_LT(c, 1.0);
    prev = c;
  }
}

TEST(ConeCos, CoincidentCentersThrow)
{
  EXPECT_THROW(cone_cos(pair({0, 0}, {1, 0}, 1)), DegeneratePairError);
  EXPECT_THROW(h_vo(pair({0, 0}, {1, 0}, 1)), DegeneratePairError);
  EXPECT_THROW(h_vo_dot_terms(pair({0, 0}, {1, 0}, 1)), DegeneratePairError);
}

TEST(HVo, Examples)
{
  EXPECT_NEAR(h_vo(pair({2, 0}, {-1, 0}, 1)), -2.0 + std::sqrt(3.0), 1e-15);
  EXPECT_EQ(h_vo(pair({2, 0}, {0, 0}, 1)), 0.0);
  EXPECT_NEAR(h_vo(pair({2, 0}, {0, 1}, 1)), std::sqrt(3.0), 1e-15);
}

TEST(HVo, OverlapUsesHalfPlane)
{
  const auto g = pair({0.5, 0}, {0.3, -2}, 1);
  EXPECT_EQ(h_vo(g), g.p_rel.dot(g.v_rel));
}

// h_vo >= 0 exactly when the relative motion never brings the discs into contact.
TEST(HVo, SignMatchesRayDiscOracle)
{
  oracle::Rng rng(11);
  int checked = 0;
  while (checked < 1000) {
    const auto g = oracle::random_pair(rng);
    const double miss = oracle::closest_approach(g.p_rel, g.v_rel);
    if (std::abs(miss - g.r_comb) < 1e-6) { continue; }  // tangential grazing
    ++checked;
    EXPECT_EQ(h_vo(g) >= 0.0, miss > g.r_comb) << "p=" << g.p_rel.transpose() << " v=" << g.v_rel.transpose();
    EXPECT_EQ(std::isinf(time_to_collision(g)), miss > g.r_comb);
  }
}

TEST(HVoDot, PerpendicularExample)
{
  const auto terms = h_vo_dot_terms(pair({2, 0}, {0, 1}, 1));
  EXPECT_NEAR(terms.hdot(Vec2::Zero()), 1.0, 1e-15);
  EXPECT_NEAR(oracle::fd_h_vo_dot(pair({2, 0}, {0, 1}, 1), Vec2::Zero()), 1.0, 1e-5);
}

TEST(HVoDot, ZeroControlGivesDrift)
{
  oracle::Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto t = h_vo_dot_terms(oracle::random_pair(rng));
    EXPECT_EQ(t.hdot(Vec2::Zero()), t.drift);
  }
}

TEST(HVoDot, ValueMatchesHVo)
{
  oracle::Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto g = oracle::random_pair(rng);
    EXPECT_NEAR(h_vo_dot_terms(g).h, h_vo(g), 1e-12);
  }
}

TEST(HVoDot, MatchesFiniteDifferences)
{
  oracle::Rng rng(5);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto g = oracle::random_pair(rng);
    const Vec2 u = oracle::uniform_vec(rng, -2.0, 2.0);
    const double analytic = h_vo_dot_terms(g).hdot(u);
    const double fd = oracle::fd_h_vo_dot(g, u);
    const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, rel);
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(HVoDot, ZeroVelocityFallback)
{
  const auto t = h_vo_dot_terms(pair({2, 1}, {1e-8, 0}, 1));
  EXPECT_EQ(t.grad_u, Vec2(2, 1));
  EXPECT_NEAR(t.drift, 1e-16, 1e-30);
}

TEST(TimeToCollision, Examples)
{
  EXPECT_DOUBLE_EQ(time_to_collision(pair({2, 0}, {-1, 0}, 1)), 1.0);
  EXPECT_TRUE(std::isinf(time_to_collision(pair({2, 0}, {0, 1}, 1))));
  EXPECT_EQ(time_to_collision(pair({3, 4}, {-3, -4}, 5)), 0.0);
}

TEST(TimeToCollision, ContactAtReturnedTime)
{
  oracle::Rng rng(6);
  int hits = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto g = oracle::random_pair(rng);
    const double t = time_to_collision(g);
    if (std::isinf(t)) { continue; }
    ++hits;
    EXPECT_NEAR((g.p_rel + t * g.v_rel).norm(), g.r_comb, 1e-9);
    // no earlier contact
    EXPECT_GT((g.p_rel + 0.999 * t * g.v_rel).norm(), g.r_comb);
  }
  EXPECT_GT(hits, 50);
}

TEST(VoWeight, Examples)
{
  EXPECT_EQ(vo_weight(2.0), 0.5);
  EXPECT_EQ(vo_weight(kInf), 0.0);
  EXPECT_EQ(vo_weight(0.0), kMaxVoWeight);
  EXPECT_EQ(vo_weight(1e-4), kMaxVoWeight);
  EXPECT_EQ(vo_weight(0.5, 10.0), 2.0);
}

TEST(VoWeight, SymmetricInPair)
{
  oracle::Rng rng(7);
  for (int k = 0; k < 1000; ++k) {
    const auto g = oracle::random_pair(rng);
    const auto flipped = pair(-g.p_rel, -g.v_rel, g.r_comb);
    EXPECT_EQ(vo_weight(time_to_collision(g)), vo_weight(time_to_collision(flipped)));
  }
}
