#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stackeval/error.hpp"
#include "stackeval/geometry.hpp"
#include "stackeval/scene.hpp"

namespace stackeval {

enum class Determiner { Definite, Indefinite, Other, Anaphor };
enum class SizeDescriptor { None, Small, Large };
enum class SideDescriptor { None, Left, Right, Front, Behind };

// A noun phrase as written; binding happens in resolve().
struct ObjectRef {
  Determiner determiner = Determiner::Definite;
  std::string shape;  // voxeme name, or "platform"; empty for "it" and tags
  std::string color;
  SizeDescriptor size = SizeDescriptor::None;
  SideDescriptor side = SideDescriptor::None;
  int ordinal = 0;     // 1-based, 0 = none
  bool group = false;  // "the stack of cubes"
  std::string tag;     // "#cube_1" names an instance directly

  bool operator==(const ObjectRef&) const = default;
};

enum class OrientationKind { Keep, Upright, UpsideDown, OnSide, FlatSideDown, RoundSideDown, AxisUp };

struct OrientationRef {
  OrientationKind kind = OrientationKind::Keep;
  Axis axis = Axis::PosY;  // AxisUp only

  bool operator==(const OrientationRef&) const = default;
};

enum class RegionKind { Ground, NextTo, InFrontOf, Behind, SameAs, Coordinates };

struct Region {
  RegionKind kind = RegionKind::Ground;
  std::optional<ObjectRef> anchor;
  Vec3 point = Vec3::Zero();  // Coordinates only

  bool operator==(const Region&) const = default;
};

struct PlaceOn {
  ObjectRef object;
  ObjectRef base;
  OrientationRef orientation;
  bool operator==(const PlaceOn&) const = default;
};

struct PlaceAt {
  ObjectRef object;
  Region region;
  OrientationRef orientation;
  bool operator==(const PlaceAt&) const = default;
};

struct Rotate {
  ObjectRef object;
  OrientationRef orientation;
  bool operator==(const Rotate&) const = default;
};

struct Climb {
  ObjectRef target;
  bool operator==(const Climb&) const = default;
};

struct Ignore {
  std::string text;
  bool operator==(const Ignore&) const = default;
};

using Action = std::variant<PlaceOn, PlaceAt, Rotate, Climb, Ignore>;

bool is_ignore(const Action& action);
std::string_view action_name(const Action& action);

struct Plan {
  std::vector<Action> steps;
  bool operator==(const Plan&) const = default;
};

// Object references mentioned in non-Ignore steps, in order of mention.
std::vector<ObjectRef> selected_objects(const Plan& plan);

std::string render(const ObjectRef& ref);
std::string render(const OrientationRef& orientation);
std::string render(const Region& region);
std::string render(const Action& action);
// One numbered line per step.
std::string render(const Plan& plan);

// Seeded draws fixed at resolve time; poses are computed at execution.
struct PlacementSample {
  std::vector<int> side_order;                   // permutation of 0..3: +x, -x, +z, -z
  std::vector<std::pair<double, double>> ground;  // (radius, angle) draws
};

struct GroundedStep {
  std::vector<ObjectId> objects;  // the moved object, or the climb target
  std::vector<ObjectId> anchors;  // base or region anchor instances
  std::optional<ErrorCode> error;
  std::string error_message;
  PlacementSample sample;
};

struct GroundedPlan {
  Plan plan;
  std::vector<GroundedStep> steps;  // parallel to plan.steps
  std::uint64_t seed = 0;
};

// Distinct ids bound in non-Ignore steps that resolved, platforms excluded.
std::vector<ObjectId> selected_ids(const GroundedPlan& plan, const Scene& scene);

}  // namespace stackeval
