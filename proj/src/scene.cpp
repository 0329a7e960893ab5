#include "stackeval/scene.hpp"

#include <algorithm>
#include <cmath>

#include "stackeval/error.hpp"

namespace stackeval {

namespace {

constexpr int kDiskSegments = 24;

// Axis-aligned habitat rotations built from sqrt(0.5) leave ~1e-16 residue in
// the matrix; snapping keeps stacked heights exact.
Eigen::Matrix3d snapped_matrix(const Rotation& rotation) {
  Eigen::Matrix3d m = rotation.normalized().toRotationMatrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double& v = m(i, j);
      if (std::abs(v) < 1e-12) {
        v = 0.0;
      } else if (std::abs(std::abs(v) - 1.0) < 1e-12) {
        v = v > 0 ? 1.0 : -1.0;
      }
    }
  }
  return m;
}

int axis_index(PrincipalAxis a) {
  switch (a) {
    case PrincipalAxis::X: return 0;
    case PrincipalAxis::Y: return 1;
    case PrincipalAxis::Z: return 2;
  }
  return 1;
}

}  // namespace

std::string_view to_string(ObjectRole role) {
  switch (role) {
    case ObjectRole::Interactable: return "interactable";
    case ObjectRole::Platform: return "platform";
    case ObjectRole::Collectible: return "collectible";
    case ObjectRole::AgentBody: return "agent";
  }
  return "interactable";
}

ObjectRole parse_role(std::string_view text) {
  if (text == "interactable") return ObjectRole::Interactable;
  if (text == "platform") return ObjectRole::Platform;
  if (text == "collectible") return ObjectRole::Collectible;
  if (text == "agent") return ObjectRole::AgentBody;
  throw Error(ErrorCode::Parse, "unknown object role '" + std::string(text) + "'");
}

Vec3 agent_right(const Agent& agent) {
  Vec3 facing = agent.facing;
  facing.y() = 0.0;
  if (facing.norm() == 0.0) facing = Vec3::UnitZ();
  return world_up().cross(facing.normalized());
}

Scene::Scene(std::shared_ptr<const VoxKb> kb, Agent agent, std::vector<SceneObject> objects)
    : kb_(std::move(kb)), agent_(std::move(agent)) {
  if (!kb_) throw Error(ErrorCode::InvalidArgument, "scene requires a knowledge base");
  for (auto& o : objects) add(std::move(o));
}

const SceneObject* Scene::find(const ObjectId& id) const {
  auto it = std::find_if(objects_.begin(), objects_.end(),
                         [&](const SceneObject& o) { return o.id == id; });
  return it == objects_.end() ? nullptr : &*it;
}

const SceneObject& Scene::at(const ObjectId& id) const {
  const SceneObject* o = find(id);
  if (!o) throw Error(ErrorCode::UnknownObject, "no object '" + id + "' in scene");
  return *o;
}

SceneObject& Scene::at(const ObjectId& id) {
  return const_cast<SceneObject&>(static_cast<const Scene&>(*this).at(id));
}

void Scene::add(SceneObject object) {
  if (object.id.empty()) throw Error(ErrorCode::InvalidSpec, "object without id");
  if (find(object.id)) throw Error(ErrorCode::InvalidSpec, "duplicate object id '" + object.id + "'");
  kb_->lookup(object.shape);
  objects_.push_back(std::move(object));
}

void Scene::remove(const ObjectId& id) {
  auto it = std::find_if(objects_.begin(), objects_.end(),
                         [&](const SceneObject& o) { return o.id == id; });
  if (it == objects_.end()) throw Error(ErrorCode::UnknownObject, "no object '" + id + "' in scene");
  objects_.erase(it);
}

void Scene::set_pose(const ObjectId& id, const Pose& pose) {
  SceneObject& o = at(id);
  o.position = pose.position;
  o.rotation = pose.rotation;
}

bool Scene::identical_to(const Scene& other) const {
  if (objects_.size() != other.objects_.size()) return false;
  if (agent_.position != other.agent_.position || agent_.facing != other.agent_.facing ||
      agent_.jump_height != other.agent_.jump_height) {
    return false;
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const SceneObject& a = objects_[i];
    const SceneObject& b = other.objects_[i];
    if (a.id != b.id || a.shape != b.shape || a.dims != b.dims || a.position != b.position ||
        !exactly_equal(a.rotation, b.rotation) || a.movable != b.movable || a.role != b.role ||
        a.color != b.color) {
      return false;
    }
  }
  return true;
}

Vec3 world_half_extents(const SceneObject& object, const Voxeme& voxeme) {
  const Eigen::Matrix3d r = snapped_matrix(object.rotation);
  const Vec3 half = 0.5 * object.dims;
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    switch (voxeme.geometry) {
      case GeometryKind::Box:
        out[i] = std::abs(r(i, 0)) * half.x() + std::abs(r(i, 1)) * half.y() +
                 std::abs(r(i, 2)) * half.z();
        break;
      case GeometryKind::Ellipsoid:
        out[i] = std::sqrt(std::pow(r(i, 0) * half.x(), 2) + std::pow(r(i, 1) * half.y(), 2) +
                           std::pow(r(i, 2) * half.z(), 2));
        break;
      case GeometryKind::Cylinder:
        out[i] = std::abs(r(i, 1)) * half.y() +
                 std::sqrt(std::pow(r(i, 0) * half.x(), 2) + std::pow(r(i, 2) * half.z(), 2));
        break;
      case GeometryKind::Capsule: {
        const double radius = std::min(half.x(), half.z());
        const double segment = std::max(half.y() - radius, 0.0);
        out[i] = std::abs(r(i, 1)) * segment +
                 std::sqrt(std::pow(r(i, 0) * half.x(), 2) + std::pow(r(i, 1) * radius, 2) +
                           std::pow(r(i, 2) * half.z(), 2));
        break;
      }
    }
  }
  return out;
}

Aabb world_bounds(const SceneObject& object, const Voxeme& voxeme) {
  const Vec3 h = world_half_extents(object, voxeme);
  const Vec3 c = object.position + Vec3(0, h.y(), 0);
  return {c - h, c + h};
}

Vec3 center_of_mass(const SceneObject& object, const Voxeme& voxeme) {
  return object.position + Vec3(0, world_half_extents(object, voxeme).y(), 0);
}

double top_height(const SceneObject& object, const Voxeme& voxeme) {
  return object.position.y() + 2.0 * world_half_extents(object, voxeme).y();
}

Polygon2 footprint(const SceneObject& object, const Habitat& habitat, const Vec3& center) {
  if (habitat.support != SurfaceClass::Flat) return {};
  const int up = axis_index(principal(habitat.up_axis));
  const int a = (up + 1) % 3;
  const int b = (up + 2) % 3;
  const double ea = 0.5 * object.dims[a] * habitat.footprint_scale;
  const double eb = 0.5 * object.dims[b] * habitat.footprint_scale;
  const Vec3 down = -axis_vector(habitat.up_axis) * (0.5 * object.dims[up]);
  const Eigen::Matrix3d r = snapped_matrix(object.rotation);

  std::vector<Point2> pts;
  auto emit = [&](double u, double v) {
    Vec3 local = down;
    local[a] += u;
    local[b] += v;
    const Vec3 w = center + r * local;
    pts.push_back({w.x(), w.z()});
  };
  if (habitat.footprint == FootprintShape::Rect) {
    emit(ea, eb);
    emit(-ea, eb);
    emit(-ea, -eb);
    emit(ea, -eb);
  } else {
    for (int k = 0; k < kDiskSegments; ++k) {
      const double t = 2.0 * M_PI * k / kDiskSegments;
      emit(ea * std::cos(t), eb * std::sin(t));
    }
  }
  return convex_hull(std::move(pts));
}

}  // namespace stackeval
