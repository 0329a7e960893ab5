#pragma once
#include <functional>
#include <set>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "stackeval/error.hpp"
#include "stackeval/physics.hpp"
#include "stackeval/rng.hpp"
#include "stackeval/scenario.hpp"
#include "stackeval/voxkb.hpp"

namespace testing_support {

using namespace stackeval;

inline std::shared_ptr<const VoxKb> kb() { return VoxKb::shared_default(); }

inline SceneObject make_object(const std::string& id, const std::string& shape, const Vec3& position,
                               Axis up = Axis::PosY, const Vec3& dims = Vec3::Ones()) {
  SceneObject o;
  o.id = id;
  o.shape = shape;
  o.dims = dims;
  o.position = position;
  o.rotation = rotation_aligning(up);
  o.color = "blue";
  return o;
}

inline SceneObject make_platform(const std::string& id, const Vec3& position, double size = 2.0) {
  SceneObject o = make_object(id, "cuboid", position, Axis::PosY, Vec3::Constant(size));
  o.movable = false;
  o.role = ObjectRole::Platform;
  o.color = "gray";
  return o;
}

inline Scene make_scene(std::vector<SceneObject> objects, Agent agent = {}) {
  return Scene(kb(), agent, std::move(objects));
}

inline Scene canonical_scene(const std::string& name = "f1") {
  static const ScenarioRegistry registry;
  return spawn(registry.get(name), kb());
}

inline const ScenarioSpec& canonical_spec(const std::string& name = "f1") {
  static const ScenarioRegistry registry;
  return registry.get(name);
}

// Index of the local axis pointing along world +-Y, read off the rotated
// basis; only meaningful for axis-aligned rotations.
inline int up_local_axis(const Rotation& r) {
  for (int j = 0; j < 3; ++j) {
    const Vec3 w = r * Vec3::Unit(j);
    if (std::abs(std::abs(w.y()) - 1.0) < 1e-9) return j;
  }
  return -1;
}

// Centre of mass for an axis-aligned pose: half the upward extent above the
// base anchor.
inline Vec3 oracle_com(const SceneObject& o) {
  const int j = up_local_axis(o.rotation);
  return o.position + Vec3(0, 0.5 * o.dims[j], 0);
}

inline int oracle_stable_count(const Scene& before, const Scene& after, const std::vector<ObjectId>& ids,
                               double tol) {
  int n = 0;
  for (const auto& id : ids) {
    if ((oracle_com(before.at(id)) - oracle_com(after.at(id))).norm() <= tol) ++n;
  }
  return n;
}

// Random arrangement of up to `max_objects` interactables in habitat
// orientations, about half dropped onto earlier objects with random offsets.
inline Scene random_scene(Rng& rng, int max_objects) {
  Scene scene = make_scene({});
  const auto names = kb()->names();
  const int n = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_objects)));
  for (int k = 0; k < n; ++k) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      const std::string& shape = names[rng.index(names.size())];
      const Voxeme& v = kb()->lookup(shape);
      SceneObject o;
      o.id = shape + "_" + std::to_string(k);
      o.shape = shape;
      const double s = rng.uniform(0.5, 1.4);
      o.dims = shape == "cube" || shape == "sphere" ? Vec3::Constant(s)
                                                    : Vec3(s, rng.uniform(0.5, 1.4), shape == "cylinder" ? s : rng.uniform(0.5, 1.4));
      if (v.geometry == GeometryKind::Cylinder || v.geometry == GeometryKind::Capsule) o.dims.z() = o.dims.x();
      const Habitat& h = v.habitats[rng.index(v.habitats.size())];
      o.rotation = habitat_rotation(h);
      double x = rng.uniform(-4.0, 4.0);
      double z = rng.uniform(-4.0, 4.0);
      if (!scene.objects().empty() && rng.uniform() < 0.5) {
        const SceneObject& below = scene.objects()[rng.index(scene.objects().size())];
        x = below.position.x() + rng.uniform(-0.6, 0.6);
        z = below.position.z() + rng.uniform(-0.6, 0.6);
      }
      o.position = Vec3(x, 0.0, z);
      o.position.y() = resting_height(scene, o);
      if (!collisions(scene, o).empty()) continue;
      scene.add(o);
      break;
    }
  }
  return scene;
}

inline std::vector<ObjectId> ids_of(const Scene& s) {
  std::vector<ObjectId> out;
  for (const auto& o : s.objects()) out.push_back(o.id);
  return out;
}

}  // namespace testing_support
