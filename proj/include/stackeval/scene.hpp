#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stackeval/geometry.hpp"
#include "stackeval/voxkb.hpp"

namespace stackeval {

using ObjectId = std::string;

enum class ObjectRole { Interactable, Platform, Collectible, AgentBody };

std::string_view to_string(ObjectRole role);
ObjectRole parse_role(std::string_view text);

// `position` is the base anchor: the centre of the bottom face of the
// object's world bounding box. An object resting on the ground has
// position.y == 0, and stacking b on a puts b.position.y at a's top.
struct Pose {
  Vec3 position = Vec3::Zero();
  Rotation rotation = Rotation::Identity();
};

struct SceneObject {
  ObjectId id;
  std::string shape;
  Vec3 dims = Vec3::Ones();  // local extents, m
  Vec3 position = Vec3::Zero();
  Rotation rotation = Rotation::Identity();
  bool movable = true;
  ObjectRole role = ObjectRole::Interactable;
  std::string color;

  Pose pose() const { return {position, rotation}; }
};

struct Agent {
  Vec3 position = Vec3::Zero();
  Vec3 facing = Vec3::UnitZ();
  double jump_height = 1.0;
};

// right = up x facing; facing +Z puts +X on the agent's right.
Vec3 agent_right(const Agent& agent);

class Scene {
 public:
  Scene() = default;
  Scene(std::shared_ptr<const VoxKb> kb, Agent agent, std::vector<SceneObject> objects = {});

  const VoxKb& kb() const { return *kb_; }
  const std::shared_ptr<const VoxKb>& kb_ptr() const { return kb_; }

  const Agent& agent() const { return agent_; }
  Agent& agent() { return agent_; }

  const std::vector<SceneObject>& objects() const { return objects_; }
  const SceneObject* find(const ObjectId& id) const;
  const SceneObject& at(const ObjectId& id) const;  // UnknownObject
  SceneObject& at(const ObjectId& id);
  bool contains(const ObjectId& id) const { return find(id) != nullptr; }

  void add(SceneObject object);
  void remove(const ObjectId& id);
  void set_pose(const ObjectId& id, const Pose& pose);

  const Voxeme& voxeme_of(const SceneObject& object) const { return kb_->lookup(object.shape); }

  // Same objects and agent with bit-identical poses.
  bool identical_to(const Scene& other) const;

 private:
  std::shared_ptr<const VoxKb> kb_;
  Agent agent_;
  std::vector<SceneObject> objects_;
};

// World-space half extents of the object's solid under its rotation.
Vec3 world_half_extents(const SceneObject& object, const Voxeme& voxeme);
Aabb world_bounds(const SceneObject& object, const Voxeme& voxeme);
// Centre of mass (geometric centre).
Vec3 center_of_mass(const SceneObject& object, const Voxeme& voxeme);
double top_height(const SceneObject& object, const Voxeme& voxeme);

// Outline of a flat habitat's contact face projected on the ground plane,
// for an object whose solid centre is at `center`.
Polygon2 footprint(const SceneObject& object, const Habitat& habitat, const Vec3& center);

struct TraceSample {
  int tick = 0;
  Vec3 position = Vec3::Zero();
  Rotation rotation = Rotation::Identity();
};

struct TrajectoryTrace {
  ObjectId object_id;
  std::vector<TraceSample> samples;
  std::string action_context;
};

}  // namespace stackeval
