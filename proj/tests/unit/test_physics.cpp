#include <gtest/gtest.h>

#include "stackeval/error.hpp"
#include "support.hpp"

using namespace stackeval;
using namespace testing_support;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Support, CubeOnGround) {
  const Scene s = make_scene({make_object("c", "cube", {0, 0, 0})});
  const SupportStatus st = support_check(s, "c");
  EXPECT_TRUE(st.supported);
  ASSERT_EQ(st.supporters.size(), 1u);
  EXPECT_EQ(st.supporters[0], "ground");
}

TEST(Support, CubeCenteredOnCube) {
  const Scene s = make_scene({make_object("a", "cube", {0, 0, 0}), make_object("b", "cube", {0, 1, 0})});
  EXPECT_TRUE(support_check(s, "b").supported);
}

TEST(Support, CubeOnSphereIsRoundContact) {
  const Scene s = make_scene({make_object("s", "sphere", {0, 0, 0}), make_object("c", "cube", {0, 1, 0})});
  const SupportStatus st = support_check(s, "c");
  EXPECT_FALSE(st.supported);
  EXPECT_EQ(st.reason, UnsupportedReason::RoundContact);
}

TEST(Support, FloatingCubeFallsFreely) {
  const Scene s = make_scene({make_object("c", "cube", {0, 0.5, 0})});
  EXPECT_EQ(support_check(s, "c").reason, UnsupportedReason::FreeFall);
}

TEST(Support, OverhangBeyondHalfWidth) {
  const Scene ok = make_scene({make_object("a", "cube", {0, 0, 0}), make_object("b", "cube", {0.4, 1, 0})});
  const Scene over = make_scene({make_object("a", "cube", {0, 0, 0}), make_object("b", "cube", {0.6, 1, 0})});
  EXPECT_TRUE(support_check(ok, "b").supported);
  EXPECT_EQ(support_check(over, "b").reason, UnsupportedReason::Overhang);
}

TEST(Support, SphereRestsOnGround) {
  const Scene s = make_scene({make_object("s", "sphere", {2, 0, 1})});
  EXPECT_TRUE(support_check(s, "s").supported);
}

TEST(Support, CubeOnLyingCylinderIsRoundContact) {
  const Scene s = make_scene({make_object("y", "cylinder", {0, 0, 0}, Axis::PosX), make_object("c", "cube", {0, 1, 0})});
  EXPECT_EQ(support_check(s, "c").reason, UnsupportedReason::RoundContact);
}

TEST(Support, CubeOnUprightCylinder) {
  const Scene s = make_scene({make_object("y", "cylinder", {0, 0, 0}), make_object("c", "cube", {0, 1, 0})});
  EXPECT_TRUE(support_check(s, "c").supported);
}

TEST(Settle, CubeSlidesOffSphereToFirstFreeSpot) {
  const Scene s = make_scene({make_object("s", "sphere", {0, 0, 0}), make_object("c", "cube", {0, 1, 0})});
  const SettleResult r = settle(s);
  // sphere spans x <= 0.5, so the cube lands with its centre at 0.5 + 0.5
  EXPECT_EQ(r.scene.at("c").position, Vec3(1.0, 0.0, 0.0));
  EXPECT_EQ(r.displaced, std::set<ObjectId>{"c"});
  ASSERT_EQ(r.traces.size(), 1u);
  EXPECT_EQ(r.traces[0].samples.size(), 3u);
  EXPECT_EQ(r.traces[0].samples.front().position, Vec3(0, 1.5, 0));
  EXPECT_EQ(r.traces[0].samples.back().position, Vec3(1.0, 0.5, 0.0));
}

TEST(Settle, ChainOnSphereCollapses) {
  const Scene s = make_scene({make_object("s", "sphere", {0, 0, 0}), make_object("c", "cube", {0, 1, 0}),
                              make_object("y", "cylinder", {0, 2, 0})});
  const SettleResult r = settle(s);
  EXPECT_EQ(r.displaced, (std::set<ObjectId>{"c", "y"}));
  EXPECT_FALSE(r.displaced.count("s"));
}

TEST(Settle, StableStairsUntouched) {
  const Scene s = make_scene({make_object("a", "cube", {0, 0, 0}), make_object("b", "cube", {1, 0, 0}),
                              make_object("y", "cylinder", {0, 1, 0})});
  const SettleResult r = settle(s);
  EXPECT_TRUE(r.displaced.empty());
  EXPECT_TRUE(r.scene.identical_to(s));
}

TEST(Place, ImmovableAndCollision) {
  const Scene s = make_scene({make_platform("p", {0, 0, 0}), make_object("c", "cube", {3, 0, 0}),
                              make_object("d", "cube", {5, 0, 0})});
  EXPECT_EQ(code_of([&] { place(s, "p", {{1, 0, 1}, Rotation::Identity()}); }), ErrorCode::Immovable);
  EXPECT_EQ(code_of([&] { place(s, "c", {{5.2, 0, 0}, Rotation::Identity()}); }), ErrorCode::CollisionAtTarget);
  const Scene moved = place(s, "c", {{3, 0, 3}, Rotation::Identity()});
  EXPECT_EQ(moved.at("c").position, Vec3(3, 0, 3));
  EXPECT_EQ(s.at("c").position, Vec3(3, 0, 0));
}

TEST(Reach, PlatformOutOfReachAlone) {
  const Scene s = make_scene({make_platform("p", {3, 0, 0})});
  EXPECT_FALSE(reachable(s, s.agent(), 2.0, ObjectId("p")).reachable);
}

TEST(Reach, TwoStepStaircase) {
  // platform x in [2, 4]; column of two at x = 1.5, one cube at x = 0.5
  const Scene s = make_scene({make_platform("p", {3, 0, 0}), make_object("a", "cube", {1.5, 0, 0}),
                              make_object("b", "cube", {1.5, 1, 0}), make_object("c", "cube", {0.5, 0, 0})});
  const Reachability r = reachable(s, s.agent(), 2.0, ObjectId("p"));
  ASSERT_TRUE(r.reachable);
  EXPECT_EQ(r.path.size(), 4u);
  EXPECT_FALSE(r.path.front().object.has_value());
  EXPECT_EQ(*r.path.back().object, "p");
}

TEST(Reach, SingleStepTooHigh) {
  // 3 m platform, x in [1.5, 4.5]; one cube against it
  const Scene s = make_scene({make_platform("p", {3, 0, 0}, 3.0), make_object("a", "cube", {1, 0, 0})});
  EXPECT_FALSE(reachable(s, s.agent(), 3.0, ObjectId("p")).reachable);
  EXPECT_TRUE(reachable(s, s.agent(), 1.0).reachable);
}

TEST(Reach, GapWiderThanStep) {
  const Scene s = make_scene({make_platform("p", {3, 0, 0}), make_object("a", "cube", {0.5, 0, 0}),
                              make_object("b", "cube", {0.5, 1, 0}), make_object("c", "cube", {-0.5, 0, 0})});
  // column top spans x in [0, 1], platform starts at 2
  EXPECT_FALSE(reachable(s, s.agent(), 2.0, ObjectId("p")).reachable);
}

TEST(Reach, PolygonGap) {
  const Polygon2 a = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Polygon2 b = convex_hull({{2, 0}, {3, 0}, {3, 1}, {2, 1}});
  EXPECT_NEAR(polygon_gap(a, b), 1.0, 1e-12);
  EXPECT_NEAR(polygon_gap(a, a), 0.0, 1e-12);
}

class SettleProperties : public ::testing::Test {
 protected:
  static constexpr int kScenes = 200;
};

TEST_F(SettleProperties, IdempotentDeterministicConserving) {
  Rng rng(2024);
  for (int k = 0; k < kScenes; ++k) {
    const Scene s = random_scene(rng, 8);
    const SettleResult a = settle(s);
    const SettleResult b = settle(s);
    ASSERT_TRUE(a.scene.identical_to(b.scene)) << "scene " << k;
    const SettleResult again = settle(a.scene);
    EXPECT_TRUE(again.displaced.empty()) << "scene " << k;
    EXPECT_TRUE(again.scene.identical_to(a.scene)) << "scene " << k;
    EXPECT_EQ(ids_of(a.scene), ids_of(s));
    for (const auto& o : a.scene.objects()) {
      EXPECT_TRUE(support_check(a.scene, o.id).supported) << o.id << " in scene " << k;
      EXPECT_EQ(o.dims, s.at(o.id).dims);
    }
    EXPECT_TRUE(s.identical_to(settle(s).scene) == a.displaced.empty());
  }
}

TEST_F(SettleProperties, LoneObjectInHabitatStays) {
  Rng rng(7);
  const auto names = kb()->names();
  for (int k = 0; k < kScenes; ++k) {
    const std::string& shape = names[rng.index(names.size())];
    const Voxeme& v = kb()->lookup(shape);
    const Habitat& h = v.habitats[rng.index(v.habitats.size())];
    const Scene s = make_scene({make_object("o", shape, {rng.uniform(-5, 5), 0, rng.uniform(-5, 5)}, h.up_axis)});
    const SettleResult r = settle(s);
    EXPECT_TRUE(r.displaced.empty()) << shape << " " << axis_name(h.up_axis);
    EXPECT_TRUE(r.scene.identical_to(s));
  }
}
