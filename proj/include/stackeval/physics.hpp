#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stackeval/scene.hpp"

namespace stackeval {

// Gap or penetration absorbed as resting contact, m.
inline constexpr double kContactTolerance = 0.01;

enum class UnsupportedReason { FreeFall, RoundContact, PointContact, Overhang };

std::string_view to_string(UnsupportedReason reason);

struct SupportStatus {
  bool supported = true;
  std::optional<UnsupportedReason> reason;
  std::vector<ObjectId> supporters;  // "ground" for the ground plane
  Polygon2 region;                   // hull of the support region
};

SupportStatus support_check(const Scene& scene, const ObjectId& id);

// Moves one object. Throws Immovable or CollisionAtTarget.
Scene place(const Scene& scene, const ObjectId& id, const Pose& pose);

// Objects (other than `object` itself) whose bounds penetrate the object's.
std::vector<ObjectId> collisions(const Scene& scene, const SceneObject& object);

// Height of the highest top under the object's horizontal bounds, or 0.
double resting_height(const Scene& scene, const SceneObject& object);

struct SettleResult {
  Scene scene;
  std::vector<TrajectoryTrace> traces;  // in order of first movement
  std::set<ObjectId> displaced;
};

// Trace samples record the object's centre of mass.
SettleResult settle(const Scene& scene, const std::string& action_context = "settle");

struct StandingSurface {
  std::optional<ObjectId> object;  // nullopt = ground
  double height = 0.0;
};

struct Reachability {
  bool reachable = false;
  std::vector<StandingSurface> path;
};

// Minimum uncovered area for a top to count as standable, m^2.
inline constexpr double kMinStandingArea = 0.25;
// Largest horizontal gap the agent steps across, m.
inline constexpr double kMaxStepGap = 0.5;

// Breadth-first search over standable flat tops. With `goal`, the path must
// end on that object's top.
Reachability reachable(const Scene& scene, const Agent& agent, double target_height,
                       const std::optional<ObjectId>& goal = std::nullopt);

// Smallest distance between two convex polygons (0 when they meet).
double polygon_gap(const Polygon2& a, const Polygon2& b);

}  // namespace stackeval
