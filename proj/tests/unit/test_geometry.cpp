#include <gtest/gtest.h>

#include "stackeval/geometry.hpp"
#include "stackeval/rng.hpp"

using namespace stackeval;

TEST(Geometry, HullOfSquareWithInteriorPoint) {
  const Polygon2 h = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  EXPECT_EQ(h.size(), 4u);
  EXPECT_DOUBLE_EQ(area(h), 1.0);
}

TEST(Geometry, HullIsCounterClockwise) {
  const Polygon2 h = convex_hull({{0, 0}, {0, 2}, {3, 0}});
  double signed_area = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = h[i];
    const auto& b = h[(i + 1) % h.size()];
    signed_area += a.x * b.z - b.x * a.z;
  }
  EXPECT_GT(signed_area, 0);
}

TEST(Geometry, ContainsBoundaryAndOutside) {
  const Polygon2 sq = convex_hull({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  EXPECT_TRUE(contains(sq, {0, 0}));
  EXPECT_TRUE(contains(sq, {1, 0}));
  EXPECT_FALSE(contains(sq, {1.01, 0}));
  EXPECT_FALSE(contains({}, {0, 0}));
}

TEST(Geometry, ClipOverlappingSquares) {
  const Polygon2 a = convex_hull({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  const Polygon2 b = convex_hull({{1, 1}, {3, 1}, {3, 3}, {1, 3}});
  EXPECT_NEAR(area(clip_convex(a, b)), 1.0, 1e-12);
  const Polygon2 far = convex_hull({{5, 5}, {6, 5}, {6, 6}});
  EXPECT_NEAR(area(clip_convex(a, far)), 0.0, 1e-12);
}

// Clipped area never exceeds either input, on random convex polygons.
TEST(Geometry, ClipAreaBoundedProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Point2> pa, pb;
    for (int k = 0; k < 6; ++k) pa.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (int k = 0; k < 6; ++k) pb.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Polygon2 a = convex_hull(pa);
    const Polygon2 b = convex_hull(pb);
    const double c = area(clip_convex(a, b));
    EXPECT_LE(c, area(a) + 1e-9);
    EXPECT_LE(c, area(b) + 1e-9);
    EXPECT_GE(c, -1e-12);
  }
}

TEST(Geometry, RotationAligningPutsAxisUp) {
  for (Axis a : {Axis::PosX, Axis::NegX, Axis::PosY, Axis::NegY, Axis::PosZ, Axis::NegZ}) {
    const Vec3 up = rotation_aligning(a) * axis_vector(a);
    EXPECT_NEAR(up.y(), 1.0, 1e-12) << axis_name(a);
  }
}

TEST(Geometry, AxisNamesRoundTrip) {
  for (Axis a : {Axis::PosX, Axis::NegX, Axis::PosY, Axis::NegY, Axis::PosZ, Axis::NegZ}) {
    EXPECT_EQ(parse_axis(axis_name(a)), a);
  }
}

TEST(Geometry, RotationDistance) {
  EXPECT_NEAR(rotation_distance(Rotation::Identity(), rotation_aligning(Axis::PosX)), M_PI / 2, 1e-12);
  EXPECT_NEAR(rotation_distance(Rotation::Identity(), Rotation::Identity()), 0.0, 1e-12);
}

TEST(Geometry, AabbPenetrationRespectsTolerance) {
  const Aabb a{{0, 0, 0}, {1, 1, 1}};
  const Aabb touching{{1, 0, 0}, {2, 1, 1}};
  const Aabb deep{{0.5, 0, 0}, {1.5, 1, 1}};
  EXPECT_FALSE(a.penetrates(touching, 0.01));
  EXPECT_TRUE(a.penetrates(deep, 0.01));
}
