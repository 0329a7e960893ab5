#include "stackeval/physics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "stackeval/error.hpp"

namespace stackeval {

namespace {

constexpr const char* kGround = "ground";

Polygon2 rect_xz(const Aabb& box) {
  return {{box.min.x(), box.min.z()},
          {box.max.x(), box.min.z()},
          {box.max.x(), box.max.z()},
          {box.min.x(), box.max.z()}};
}

bool overlaps_xz(const Aabb& a, const Aabb& b) {
  return a.overlap(b, 0) > 0.0 && a.overlap(b, 2) > 0.0;
}

Polygon2 top_face(const SceneObject& o, const Voxeme& v) {
  const Habitat& h = active_habitat(v, o.rotation);
  if (!h.flat_top()) return {};
  return footprint(o, h, center_of_mass(o, v));
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dz = b.z - a.z;
  const double len2 = dx * dx + dz * dz;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a.x + t * dx - p.x, a.z + t * dz - p.z);
}

double orient(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

Rotation snap_to_nearest_habitat(const Voxeme& v, const Rotation& r) {
  const Habitat* best = nullptr;
  double best_dev = 0.0;
  for (const Habitat& h : v.habitats) {
    const double dev = angle_between(r * axis_vector(h.up_axis), world_up());
    if (!best || dev < best_dev) {
      best = &h;
      best_dev = dev;
    }
  }
  return habitat_rotation(*best);
}

// Ground position at the smallest x >= the current x with no penetration.
Vec3 free_ground_spot(const Scene& scene, const SceneObject& moving) {
  const Voxeme& v = scene.voxeme_of(moving);
  const double hx = world_half_extents(moving, v).x();
  std::vector<double> candidates{moving.position.x()};
  std::vector<Aabb> obstacles;
  for (const SceneObject& o : scene.objects()) {
    if (o.id == moving.id) continue;
    const Aabb b = world_bounds(o, scene.voxeme_of(o));
    obstacles.push_back(b);
    const double x = b.max.x() + hx;
    if (x > moving.position.x()) candidates.push_back(x);
  }
  std::sort(candidates.begin(), candidates.end());
  for (double x : candidates) {
    SceneObject probe = moving;
    probe.position = Vec3(x, 0.0, moving.position.z());
    const Aabb pb = world_bounds(probe, v);
    const bool blocked = std::any_of(obstacles.begin(), obstacles.end(), [&](const Aabb& b) {
      return pb.penetrates(b, kContactTolerance);
    });
    if (!blocked) return probe.position;
  }
  throw Error(ErrorCode::NonTermination, "no free ground position for '" + moving.id + "'");
}

}  // namespace

std::string_view to_string(UnsupportedReason reason) {
  switch (reason) {
    case UnsupportedReason::FreeFall: return "free-fall";
    case UnsupportedReason::RoundContact: return "round-contact";
    case UnsupportedReason::PointContact: return "point-contact";
    case UnsupportedReason::Overhang: return "overhang";
  }
  return "free-fall";
}

SupportStatus support_check(const Scene& scene, const ObjectId& id) {
  const SceneObject& obj = scene.at(id);
  SupportStatus status;
  if (!obj.movable) return status;

  const Voxeme& v = scene.voxeme_of(obj);
  const Habitat& bottom = active_habitat(v, obj.rotation);
  const Vec3 com = center_of_mass(obj, v);
  const Aabb bounds = world_bounds(obj, v);
  const double base = obj.position.y();
  const Polygon2 own = footprint(obj, bottom, com);

  std::vector<Point2> region;
  bool round_top = false;
  if (std::abs(base) <= kContactTolerance) {
    status.supporters.push_back(kGround);
    if (bottom.support == SurfaceClass::Flat) {
      region.insert(region.end(), own.begin(), own.end());
    } else if (bottom.support == SurfaceClass::Round) {
      region.push_back({com.x(), com.z()});
    }
  }
  for (const SceneObject& o : scene.objects()) {
    if (o.id == id) continue;
    const Voxeme& ov = scene.voxeme_of(o);
    if (std::abs(top_height(o, ov) - base) > kContactTolerance) continue;
    if (!overlaps_xz(bounds, world_bounds(o, ov))) continue;
    status.supporters.push_back(o.id);
    const Polygon2 top = top_face(o, ov);
    if (top.empty()) {
      round_top = true;
      continue;
    }
    if (bottom.support != SurfaceClass::Flat) continue;
    const Polygon2 shared = clip_convex(own, top);
    region.insert(region.end(), shared.begin(), shared.end());
  }

  if (status.supporters.empty()) {
    status.supported = false;
    status.reason = UnsupportedReason::FreeFall;
    return status;
  }
  status.region = convex_hull(std::move(region));
  if (contains(status.region, {com.x(), com.z()})) return status;

  status.supported = false;
  if (!status.region.empty()) {
    status.reason = UnsupportedReason::Overhang;
  } else if (bottom.support == SurfaceClass::Point) {
    status.reason = UnsupportedReason::PointContact;
  } else if (round_top || bottom.support == SurfaceClass::Round) {
    status.reason = UnsupportedReason::RoundContact;
  } else {
    status.reason = UnsupportedReason::Overhang;
  }
  return status;
}

std::vector<ObjectId> collisions(const Scene& scene, const SceneObject& object) {
  const Aabb b = world_bounds(object, scene.voxeme_of(object));
  std::vector<ObjectId> out;
  for (const SceneObject& o : scene.objects()) {
    if (o.id == object.id) continue;
    if (b.penetrates(world_bounds(o, scene.voxeme_of(o)), kContactTolerance)) out.push_back(o.id);
  }
  return out;
}

double resting_height(const Scene& scene, const SceneObject& object) {
  const Aabb b = world_bounds(object, scene.voxeme_of(object));
  double height = 0.0;
  for (const SceneObject& o : scene.objects()) {
    if (o.id == object.id) continue;
    const Aabb ob = world_bounds(o, scene.voxeme_of(o));
    if (b.overlap(ob, 0) > kContactTolerance && b.overlap(ob, 2) > kContactTolerance) {
      height = std::max(height, ob.max.y());
    }
  }
  return height;
}

Scene place(const Scene& scene, const ObjectId& id, const Pose& pose) {
  const SceneObject& current = scene.at(id);
  if (!current.movable) throw Error(ErrorCode::Immovable, "'" + id + "' cannot be moved");
  SceneObject moved = current;
  moved.position = pose.position;
  moved.rotation = pose.rotation;
  if (moved.position.y() < -kContactTolerance) {
    throw Error(ErrorCode::CollisionAtTarget, "'" + id + "' would be below the ground");
  }
  const auto hits = collisions(scene, moved);
  if (!hits.empty()) {
    throw Error(ErrorCode::CollisionAtTarget, "'" + id + "' would intersect '" + hits.front() + "'");
  }
  Scene out = scene;
  out.set_pose(id, pose);
  return out;
}

SettleResult settle(const Scene& input, const std::string& action_context) {
  SettleResult result{input, {}, {}};
  Scene& scene = result.scene;
  std::map<ObjectId, std::size_t> trace_index;

  std::size_t movable = 0;
  for (const SceneObject& o : scene.objects()) movable += o.movable ? 1 : 0;
  const std::size_t max_passes = movable + 2;

  for (std::size_t pass = 0;; ++pass) {
    if (pass >= max_passes) {
      throw Error(ErrorCode::NonTermination, "settle exceeded " + std::to_string(max_passes) + " passes");
    }
    std::vector<std::pair<double, ObjectId>> order;
    for (const SceneObject& o : scene.objects()) {
      if (o.movable) order.emplace_back(o.position.y(), o.id);
    }
    std::sort(order.begin(), order.end());

    bool moved = false;
    for (const auto& [_, id] : order) {
      if (support_check(scene, id).supported) continue;
      SceneObject obj = scene.at(id);
      const Voxeme& v = scene.voxeme_of(obj);
      const Vec3 start_com = center_of_mass(obj, v);
      const Rotation start_rot = obj.rotation;

      if (active_habitat(v, obj.rotation).support == SurfaceClass::Point) {
        obj.rotation = snap_to_nearest_habitat(v, obj.rotation);
      }
      obj.position = free_ground_spot(scene, obj);
      scene.set_pose(id, obj.pose());
      const Vec3 end_com = center_of_mass(obj, v);

      auto [it, fresh] = trace_index.emplace(id, result.traces.size());
      if (fresh) result.traces.push_back({id, {}, action_context});
      auto& samples = result.traces[it->second].samples;
      const int tick = static_cast<int>(3 * pass);
      samples.push_back({tick, start_com, start_rot});
      samples.push_back({tick + 1, 0.5 * (start_com + end_com), start_rot.slerp(0.5, obj.rotation)});
      samples.push_back({tick + 2, end_com, obj.rotation});
      result.displaced.insert(id);
      moved = true;
    }
    if (!moved) break;
  }
  return result;
}

double polygon_gap(const Polygon2& a, const Polygon2& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  for (const Point2& p : a) {
    if (contains(b, p)) return 0.0;
  }
  for (const Point2& p : b) {
    if (contains(a, p)) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point2 a0 = a[i];
    const Point2 a1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Point2 b0 = b[j];
      const Point2 b1 = b[(j + 1) % b.size()];
      if (segments_cross(a0, a1, b0, b1)) return 0.0;
      best = std::min({best, segment_distance(a0, b0, b1), segment_distance(a1, b0, b1),
                       segment_distance(b0, a0, a1), segment_distance(b1, a0, a1)});
    }
  }
  return best;
}

Reachability reachable(const Scene& scene, const Agent& agent, double target_height,
                       const std::optional<ObjectId>& goal) {
  struct Node {
    StandingSurface surface;
    Polygon2 face;  // empty for the ground
  };
  std::vector<Node> nodes{{{std::nullopt, 0.0}, {}}};
  for (const SceneObject& o : scene.objects()) {
    const Voxeme& v = scene.voxeme_of(o);
    Polygon2 face = top_face(o, v);
    if (face.size() < 3) continue;
    const double top = top_height(o, v);
    double uncovered = area(face);
    for (const SceneObject& other : scene.objects()) {
      if (other.id == o.id) continue;
      const Voxeme& ov = scene.voxeme_of(other);
      if (std::abs(other.position.y() - top) > kContactTolerance) continue;
      uncovered -= area(clip_convex(face, rect_xz(world_bounds(other, ov))));
    }
    if (uncovered + 1e-9 < kMinStandingArea) continue;
    nodes.push_back({{o.id, top}, std::move(face)});
  }

  auto is_goal = [&](const Node& n) {
    if (goal) return n.surface.object == goal;
    return n.surface.height >= target_height - kContactTolerance;
  };

  std::size_t start = 0;
  if (agent.position.y() > kContactTolerance) {
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (std::abs(nodes[i].surface.height - agent.position.y()) <= kContactTolerance &&
          contains(nodes[i].face, {agent.position.x(), agent.position.z()}, kContactTolerance)) {
        start = i;
        break;
      }
    }
  }

  std::vector<std::optional<std::size_t>> parent(nodes.size());
  std::vector<bool> seen(nodes.size(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    if (is_goal(nodes[cur])) {
      Reachability out{true, {}};
      for (std::optional<std::size_t> n = cur; n; n = parent[*n]) out.path.push_back(nodes[*n].surface);
      std::reverse(out.path.begin(), out.path.end());
      return out;
    }
    for (std::size_t next = 0; next < nodes.size(); ++next) {
      if (seen[next]) continue;
      const double rise = nodes[next].surface.height - nodes[cur].surface.height;
      if (rise > agent.jump_height + kContactTolerance) continue;
      const bool adjacent = cur == 0 || next == 0 ||
                            polygon_gap(nodes[cur].face, nodes[next].face) <= kMaxStepGap;
      if (!adjacent) continue;
      seen[next] = true;
      parent[next] = cur;
      queue.push_back(next);
    }
  }
  return {};
}

}  // namespace stackeval
