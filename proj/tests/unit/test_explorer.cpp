#include <gtest/gtest.h>

#include "stackeval/explorer.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

const GroundingModel& model() {
  static const GroundingModel m = train_default_model(kb(), 0);
  return m;
}

const char* kLlama =
    "1. Place the cube on top of the sphere.\n"
    "2. Place the cylinder on top of the cube.";

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

TEST(Explorer, ProbeFlatObjectRests) {
  const Scene s = canonical_scene();
  const TrajectoryTrace t = stack_probe(s, "cube_1");
  ASSERT_EQ(t.samples.size(), 2u);
  EXPECT_EQ(t.samples.front().position, t.samples.back().position);
  EXPECT_EQ(t.samples.front().position, Vec3(0, 1.5, 0));
}

TEST(Explorer, ProbeRoundObjectFalls) {
  const Scene s = canonical_scene();
  ProbeOptions o;
  o.jitter = Vec3(0.005, 0, 0);
  const TrajectoryTrace t = stack_probe(s, "sphere_1", o);
  ASSERT_GE(t.samples.size(), 2u);
  EXPECT_NEAR(t.samples.back().position.y(), 0.5, 1e-9);
  EXPECT_GT(std::hypot(t.samples.back().position.x(), t.samples.back().position.z()), 0.5);
}

TEST(Explorer, ProbeLeavesSceneUntouched) {
  const Scene s = canonical_scene();
  const Scene copy = s;
  stack_probe(s, "cylinder_2");
  stack_probe(s, "sphere_1");
  EXPECT_TRUE(s.identical_to(copy));
  EXPECT_EQ(code_of([&] { stack_probe(s, "platform_1"); }), ErrorCode::Immovable);
}

TEST(Explorer, ArenaExcludesMixedShapes) {
  const auto data = probe_arena(*kb(), 0, 2);
  std::set<std::string> shapes;
  for (const auto& d : data) shapes.insert(d.shape);
  EXPECT_EQ(shapes.size(), 8u);
  EXPECT_FALSE(shapes.count("cylinder"));
  for (const auto& r : model().references) EXPECT_NE(r.shape, "cylinder");
  EXPECT_EQ(data.front().trace_id.substr(0, data.front().shape.size() + 1), data.front().shape + "/");
}

TEST(Explorer, CylinderGrounding) {
  const Scene s = canonical_scene();
  const Voxeme& v = kb()->lookup("cylinder");
  const HabitatGrounding upright = ground_object(s, "cylinder_2", rotation_aligning(Axis::PosY), model(), 0);
  const HabitatGrounding lying = ground_object(s, "cylinder_2", rotation_aligning(Axis::PosX), model(), 0);
  EXPECT_EQ(upright.label, GroundLabel::Flat);
  EXPECT_EQ(lying.label, GroundLabel::Round);
  EXPECT_EQ(upright.neighbors.size(), static_cast<std::size_t>(kNeighbors));
  EXPECT_FALSE(v.habitats.empty());
}

TEST(Explorer, DetermineHabitat) {
  const Scene s = canonical_scene();
  const HabitatChoice c = determine_habitat(s, "cylinder_2", model(), 0);
  EXPECT_EQ(c.up_axis, Axis::PosY);
  EXPECT_EQ(c.tried.back().label, GroundLabel::Flat);
  EXPECT_EQ(determine_habitat(s, "cube_2", model(), 0).tried.size(), 1u);
  EXPECT_EQ(code_of([&] { determine_habitat(s, "sphere_1", model(), 0); }), ErrorCode::NoFlatHabitat);
  EXPECT_EQ(code_of([&] { determine_habitat(s, "platform_1", model(), 0); }), ErrorCode::Immovable);
}

TEST(Explorer, StaircaseHeights) {
  const Scene s = canonical_scene();
  for (double target : {1.0, 2.0}) {
    const Staircase st = synthesize_staircase(s, target, 1.0, model(), 0);
    EXPECT_EQ(st.platform, "platform_1");
    const GroundedPlan g = resolve(st.plan, s, 0);
    const ExecutionTrace t = operationalize(g, s, ExecutionMode::Strict);
    EXPECT_FALSE(t.failure_step());
    EXPECT_EQ(stability(t.configured, t.settled, t.placed), 1.0);
    EXPECT_TRUE(reachable(t.final_scene, s.agent(), target).reachable) << target;
    std::size_t moves = 0;
    for (const auto& a : st.plan.steps) moves += std::holds_alternative<Climb>(a) ? 0 : 1;
    EXPECT_EQ(moves, target == 1.0 ? 1u : 3u);
    for (const auto& id : t.placed) EXPECT_NE(s.at(id).shape, "sphere");
  }
}

TEST(Explorer, OnlySpheresIsUnsolvable) {
  const Scene s = make_scene({make_object("sphere_1", "sphere", Vec3(1, 0, 2)),
                              make_object("sphere_2", "sphere", Vec3(-1, 0, 2)),
                              make_object("sphere_3", "sphere", Vec3(0, 0, -2)),
                              make_platform("platform_1", Vec3(4, 0, 4))});
  EXPECT_EQ(code_of([&] { synthesize_staircase(s, 2.0, 1.0, model(), 0); }), ErrorCode::Unsolvable);
}

TEST(Explorer, RepairsFailingPlan) {
  const Scene s = canonical_scene();
  const GroundedPlan g = resolve(parse(kLlama), s, 0);
  const Exploration e = explore(s, g, canonical_spec().references, model(), 0);
  ASSERT_TRUE(e.trigger);
  EXPECT_EQ(*e.trigger, 0u);
  ASSERT_TRUE(e.plan);
  ASSERT_TRUE(e.report);
  EXPECT_EQ(e.report->stability, 1.0);
  EXPECT_EQ(e.report->iou, 1.0);
  EXPECT_TRUE(e.reach.reachable);
  EXPECT_FALSE(e.decisions.empty());
}

TEST(Explorer, PassingPlanIsReported) {
  const Scene s = canonical_scene();
  const GroundedPlan g = resolve(parse("Place the cube on the ground."), s, 0);
  const Exploration e = explore(s, g, canonical_spec().references, model(), 0);
  EXPECT_FALSE(e.trigger);
  EXPECT_FALSE(e.plan);
  ASSERT_TRUE(e.report);
  EXPECT_FALSE(e.reach.reachable);
}
