#include <gtest/gtest.h>

#include "stackeval/metrics.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

const char* kLlama =
    "You can use the cube on top of the sphere to get to the desired height. Here's how:\n"
    "1. Place the cube on top of the sphere. This will give you a total height of 1.5 meters "
    "(1 meter for the cube + 0.5 meters for the sphere).\n"
    "2. Place the cylinder on top of the cube. This will give you a total height of 2 meters "
    "(1 meter for the cube + 1 meter for the cylinder).";

const char* kStaircase =
    "Stand the cylinder upright next to the platform. Place a cube next to the cylinder. "
    "Place the other cube on top of the cylinder. Climb onto the platform.";

struct Scored {
  GroundedPlan plan;
  ExecutionTrace trace;
  EvalReport report;
};

Scored run(const std::string& text, const std::string& scenario, ExecutionMode mode) {
  const Scene scene = canonical_scene(scenario);
  Scored r;
  r.plan = resolve(parse(text), scene, 0, {.lenient = true});
  r.trace = operationalize(r.plan, scene, mode);
  r.report = report(r.trace, r.plan, canonical_spec(scenario).references);
  return r;
}

std::size_t on_sphere_step(const Plan& plan) {
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (const auto* p = std::get_if<PlaceOn>(&plan.steps[i]); p && p->base.shape == "sphere") return i;
  }
  return plan.steps.size();
}

}  // namespace

TEST(Executor, LlamaPermissive) {
  const Scored r = run(kLlama, "f1", ExecutionMode::Permissive);
  EXPECT_DOUBLE_EQ(r.report.iou, 0.5);
  EXPECT_LT(r.report.stability, 1.0);
  EXPECT_FALSE(r.report.failure_step);
  const double oracle = static_cast<double>(oracle_stable_count(r.trace.configured, r.trace.settled, r.trace.placed,
                                                                kDisplacementTolerance)) /
                        static_cast<double>(r.trace.placed.size());
  EXPECT_DOUBLE_EQ(r.report.stability, oracle);
  EXPECT_FALSE(r.trace.displaced.empty());
}

TEST(Executor, LlamaStrictFailsOnSphere) {
  const Scored r = run(kLlama, "f1", ExecutionMode::Strict);
  ASSERT_TRUE(r.report.failure_step);
  EXPECT_EQ(*r.report.failure_step, on_sphere_step(r.plan.plan));
  EXPECT_EQ(r.report.failure_reason, FailureReason::Displaced);
  // The failed placement is not committed.
  EXPECT_TRUE(r.trace.final_scene.identical_to(r.trace.initial));
  for (std::size_t i = *r.report.failure_step + 1; i < r.trace.steps.size(); ++i) {
    EXPECT_EQ(r.trace.steps[i].status, StepStatus::NotExecuted);
  }
}

TEST(Executor, StaircaseGolden) {
  for (auto mode : {ExecutionMode::Permissive, ExecutionMode::Strict}) {
    const Scored r = run(kStaircase, "f6", mode);
    EXPECT_EQ(r.report.stability, 1.0);
    EXPECT_EQ(r.report.iou, 1.0);
    EXPECT_FALSE(r.report.failure_step);
    const Scene& done = r.trace.final_scene;
    EXPECT_TRUE(reachable(done, done.agent(), 2.0).reachable);
  }
}

TEST(Executor, EmptyPlan) {
  const Scored r = run("", "f1", ExecutionMode::Strict);
  EXPECT_EQ(r.report.stability, 1.0);
  EXPECT_EQ(r.report.iou, 0.0);
  EXPECT_FALSE(r.report.failure_step);
  EXPECT_TRUE(r.trace.final_scene.identical_to(r.trace.initial));
}

TEST(Executor, UnknownObjectStep) {
  const Scored r = run("Place the cube on top of the ladder.", "f1", ExecutionMode::Permissive);
  ASSERT_TRUE(r.report.failure_step);
  EXPECT_EQ(*r.report.failure_step, 0u);
  EXPECT_EQ(r.report.failure_reason, FailureReason::UnknownObject);
}

TEST(Executor, CollisionAtTarget) {
  const Scored r = run("Place a cube next to the platform. Place the other cube in the same place as the cube.", "f1",
                    ExecutionMode::Permissive);
  ASSERT_TRUE(r.report.failure_step);
  EXPECT_EQ(*r.report.failure_step, 1u);
  EXPECT_EQ(r.report.failure_reason, FailureReason::CollisionAtTarget);
}

TEST(Executor, ImmovablePlatform) {
  const Scored r = run("Place the platform on top of the cube.", "f1", ExecutionMode::Permissive);
  ASSERT_TRUE(r.report.failure_step);
  EXPECT_EQ(r.report.failure_reason, FailureReason::Immovable);
}

TEST(Executor, InputSceneUntouched) {
  const Scene scene = canonical_scene();
  const Scene copy = scene;
  const GroundedPlan g = resolve(parse(kLlama), scene, 3);
  operationalize(g, scene, ExecutionMode::Permissive);
  operationalize(g, scene, ExecutionMode::Strict);
  EXPECT_TRUE(scene.identical_to(copy));
}

TEST(Executor, Deterministic) {
  const Scored a = run(kStaircase, "f1", ExecutionMode::Permissive);
  const Scored b = run(kStaircase, "f1", ExecutionMode::Permissive);
  EXPECT_TRUE(a.trace.final_scene.identical_to(b.trace.final_scene));
  EXPECT_EQ(to_json(a.report), to_json(b.report));
}

TEST(Executor, Modes) {
  EXPECT_EQ(parse_mode("strict"), ExecutionMode::Strict);
  EXPECT_EQ(to_string(ExecutionMode::Permissive), "permissive");
  EXPECT_THROW(parse_mode("loose"), Error);
}
