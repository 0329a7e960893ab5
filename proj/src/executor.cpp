#include "stackeval/executor.hpp"

#include <algorithm>
#include <cmath>

namespace stackeval {

namespace {

struct StepFailure {
  FailureReason reason;
  std::string detail;
};

Aabb union_bounds(const Scene& scene, const std::vector<ObjectId>& ids) {
  Aabb box = world_bounds(scene.at(ids.front()), scene.voxeme_of(scene.at(ids.front())));
  for (const auto& id : ids) {
    const Aabb b = world_bounds(scene.at(id), scene.voxeme_of(scene.at(id)));
    box.min = box.min.cwiseMin(b.min);
    box.max = box.max.cwiseMax(b.max);
  }
  return box;
}

Scene commit(const Scene& scene, const ObjectId& id, const Pose& pose) {
  try {
    return place(scene, id, pose);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Immovable) throw StepFailure{FailureReason::Immovable, e.what()};
    throw StepFailure{FailureReason::CollisionAtTarget, e.what()};
  }
}

void require_movable(const Scene& scene, const ObjectId& id) {
  if (!scene.at(id).movable) throw StepFailure{FailureReason::Immovable, "'" + id + "' cannot be moved"};
}

// Side index: 0 +x, 1 -x, 2 +z, 3 -z.
Scene place_beside(const Scene& scene, const ObjectId& id, const Rotation& rotation,
                   const std::vector<ObjectId>& anchors, const std::vector<int>& sides) {
  require_movable(scene, id);
  const Aabb a = union_bounds(scene, anchors);
  SceneObject candidate = scene.at(id);
  candidate.rotation = rotation;
  const Voxeme& v = scene.voxeme_of(candidate);
  const Vec3 h = world_half_extents(candidate, v);
  const Vec3 c = a.center();
  for (int side : sides) {
    Vec3 p(c.x(), 0.0, c.z());
    switch (side) {
      case 0: p.x() = a.max.x() + h.x(); break;
      case 1: p.x() = a.min.x() - h.x(); break;
      case 2: p.z() = a.max.z() + h.z(); break;
      default: p.z() = a.min.z() - h.z(); break;
    }
    candidate.position = p;
    p.y() = resting_height(scene, candidate);
    if (p.y() > a.min.y() + kContactTolerance) continue;
    candidate.position = p;
    if (!collisions(scene, candidate).empty()) continue;
    return commit(scene, id, {p, rotation});
  }
  throw StepFailure{FailureReason::CollisionAtTarget, "no free position beside the anchor for '" + id + "'"};
}

int side_facing(const Scene& scene, const std::vector<ObjectId>& anchors, bool toward_agent) {
  const Vec3 c = union_bounds(scene, anchors).center();
  const Vec3 d = scene.agent().position - c;
  int side = std::abs(d.x()) > std::abs(d.z()) ? (d.x() > 0 ? 0 : 1) : (d.z() > 0 ? 2 : 3);
  if (!toward_agent) side ^= 1;
  return side;
}

Scene place_on(const Scene& scene, const ObjectId& id, const Rotation& rotation,
               const std::vector<ObjectId>& anchors) {
  require_movable(scene, id);
  const SceneObject* base = nullptr;
  double best = -1.0;
  for (const auto& a : anchors) {
    const SceneObject& o = scene.at(a);
    const double top = top_height(o, scene.voxeme_of(o));
    if (top > best) {
      best = top;
      base = &o;
    }
  }
  const Vec3 com = center_of_mass(*base, scene.voxeme_of(*base));
  SceneObject candidate = scene.at(id);
  candidate.rotation = rotation;
  candidate.position = Vec3(com.x(), 0.0, com.z());
  const double y = std::max(best, resting_height(scene, candidate));
  return commit(scene, id, {Vec3(com.x(), y, com.z()), rotation});
}

Scene place_on_ground(const Scene& scene, const ObjectId& id, const Rotation& rotation,
                      const PlacementSample& sample) {
  require_movable(scene, id);
  SceneObject candidate = scene.at(id);
  candidate.rotation = rotation;
  const Vec3 origin = scene.agent().position;
  for (const auto& [radius, angle] : sample.ground) {
    candidate.position = Vec3(origin.x() + radius * std::cos(angle), 0.0, origin.z() + radius * std::sin(angle));
    if (resting_height(scene, candidate) > kContactTolerance) continue;
    if (!collisions(scene, candidate).empty()) continue;
    return commit(scene, id, candidate.pose());
  }
  throw StepFailure{FailureReason::CollisionAtTarget, "no free ground position for '" + id + "'"};
}

bool is_placement(const Action& a) {
  return std::holds_alternative<PlaceOn>(a) || std::holds_alternative<PlaceAt>(a) ||
         std::holds_alternative<Rotate>(a);
}

const OrientationRef& orientation_of(const Action& a) {
  static const OrientationRef kKeep;
  if (auto* p = std::get_if<PlaceOn>(&a)) return p->orientation;
  if (auto* p = std::get_if<PlaceAt>(&a)) return p->orientation;
  if (auto* p = std::get_if<Rotate>(&a)) return p->orientation;
  return kKeep;
}

Scene apply_step(Scene cur, const Action& action, const GroundedStep& step, ExecutionMode mode) {
  if (auto* climb = std::get_if<Climb>(&action)) {
    (void)climb;
    if (mode == ExecutionMode::Permissive) return cur;
    const SceneObject& target = cur.at(step.objects.front());
    const Voxeme& v = cur.voxeme_of(target);
    const Reachability r = reachable(cur, cur.agent(), top_height(target, v), target.id);
    if (!r.reachable) {
      throw StepFailure{FailureReason::Unreachable, "cannot reach the top of '" + target.id + "'"};
    }
    const Vec3 com = center_of_mass(target, v);
    cur.agent().position = Vec3(com.x(), top_height(target, v), com.z());
    return cur;
  }

  const ObjectId& id = step.objects.front();
  const SceneObject& obj = cur.at(id);
  const Rotation rotation = target_rotation(cur.voxeme_of(obj), obj.rotation, orientation_of(action));

  if (std::holds_alternative<PlaceOn>(action)) return place_on(cur, id, rotation, step.anchors);
  if (std::holds_alternative<Rotate>(action)) {
    require_movable(cur, id);
    return commit(cur, id, {obj.position, rotation});
  }
  const Region& region = std::get<PlaceAt>(action).region;
  switch (region.kind) {
    case RegionKind::Ground: return place_on_ground(cur, id, rotation, step.sample);
    case RegionKind::NextTo: return place_beside(cur, id, rotation, step.anchors, step.sample.side_order);
    case RegionKind::InFrontOf:
      return place_beside(cur, id, rotation, step.anchors, {side_facing(cur, step.anchors, true)});
    case RegionKind::Behind:
      return place_beside(cur, id, rotation, step.anchors, {side_facing(cur, step.anchors, false)});
    case RegionKind::SameAs:
      require_movable(cur, id);
      return commit(cur, id, {cur.at(step.anchors.front()).position, rotation});
    case RegionKind::Coordinates:
      require_movable(cur, id);
      return commit(cur, id, {region.point, rotation});
  }
  return cur;
}

void note_placed(const Scene& scene, const GroundedStep& step, std::vector<ObjectId>& placed) {
  auto add = [&](const ObjectId& id) {
    const SceneObject* o = scene.find(id);
    if (o && o->role == ObjectRole::Platform) return;
    if (std::find(placed.begin(), placed.end(), id) == placed.end()) placed.push_back(id);
  };
  for (const auto& id : step.objects) add(id);
  for (const auto& id : step.anchors) add(id);
}

}  // namespace

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::Strict ? "strict" : "permissive";
}

ExecutionMode parse_mode(std::string_view text) {
  if (text == "strict") return ExecutionMode::Strict;
  if (text == "permissive") return ExecutionMode::Permissive;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::Executed: return "executed";
    case StepStatus::Failed: return "failed";
    case StepStatus::Ignored: return "ignored";
    case StepStatus::NotExecuted: return "not_executed";
  }
  return "not_executed";
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::UnknownObject: return "unknown_object";
    case FailureReason::Immovable: return "immovable";
    case FailureReason::CollisionAtTarget: return "collision_at_target";
    case FailureReason::Displaced: return "displaced";
    case FailureReason::Unreachable: return "unreachable";
  }
  return "unknown_object";
}

std::optional<std::size_t> ExecutionTrace::failure_step() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].status == StepStatus::Failed) return i;
  }
  return std::nullopt;
}

Rotation target_rotation(const Voxeme& voxeme, const Rotation& current, const OrientationRef& orientation) {
  auto first_habitat = [&](auto pred) -> const Habitat* {
    for (const Habitat& h : voxeme.habitats) {
      if (pred(h)) return &h;
    }
    return nullptr;
  };
  const Habitat* chosen = nullptr;
  switch (orientation.kind) {
    case OrientationKind::Keep: return current;
    case OrientationKind::Upright: return rotation_aligning(Axis::PosY);
    case OrientationKind::UpsideDown: return rotation_aligning(Axis::NegY);
    case OrientationKind::AxisUp: return rotation_aligning(orientation.axis);
    case OrientationKind::OnSide:
      chosen = first_habitat([](const Habitat& h) { return principal(h.up_axis) != PrincipalAxis::Y; });
      if (!chosen) return rotation_aligning(Axis::PosX);
      break;
    case OrientationKind::FlatSideDown:
      if (active_habitat(voxeme, current).support == SurfaceClass::Flat) return current;
      chosen = first_habitat([](const Habitat& h) { return h.support == SurfaceClass::Flat; });
      break;
    case OrientationKind::RoundSideDown:
      if (active_habitat(voxeme, current).support == SurfaceClass::Round) return current;
      chosen = first_habitat([](const Habitat& h) { return h.support == SurfaceClass::Round; });
      break;
  }
  return chosen ? habitat_rotation(*chosen) : current;
}

ExecutionTrace operationalize(const GroundedPlan& plan, const Scene& scene, ExecutionMode mode) {
  ExecutionTrace trace;
  trace.mode = mode;
  trace.initial = scene;
  trace.steps.resize(plan.plan.steps.size());
  Scene cur = scene;
  bool failed = false;
  bool strict_configured = false;

  for (std::size_t i = 0; i < plan.plan.steps.size() && !failed; ++i) {
    const Action& action = plan.plan.steps[i];
    const GroundedStep& step = plan.steps.at(i);
    StepOutcome& out = trace.steps[i];
    if (is_ignore(action)) {
      out.status = StepStatus::Ignored;
      continue;
    }
    if (step.error || step.objects.empty()) {
      out.status = StepStatus::Failed;
      out.reason = FailureReason::UnknownObject;
      out.detail = step.error_message;
      failed = true;
      break;
    }
    try {
      Scene next = apply_step(cur, action, step, mode);
      if (is_placement(action)) out.moved = {step.objects.front()};
      if (mode == ExecutionMode::Strict && is_placement(action)) {
        SettleResult s = settle(next, render(action));
        if (!s.displaced.empty()) {
          out.status = StepStatus::Failed;
          out.reason = FailureReason::Displaced;
          out.detail = "settling displaced " + std::to_string(s.displaced.size()) + " object(s)";
          note_placed(cur, step, trace.placed);
          trace.configured = std::move(next);
          trace.settled = std::move(s.scene);
          trace.traces = std::move(s.traces);
          trace.displaced = std::move(s.displaced);
          strict_configured = true;
          failed = true;
          break;
        }
        next = std::move(s.scene);
      }
      if (is_placement(action)) note_placed(cur, step, trace.placed);
      cur = std::move(next);
      out.status = StepStatus::Executed;
    } catch (const StepFailure& f) {
      out.status = StepStatus::Failed;
      out.reason = f.reason;
      out.detail = f.detail;
      failed = true;
    } catch (const Error& e) {
      out.status = StepStatus::Failed;
      out.reason = e.code() == ErrorCode::Immovable ? FailureReason::Immovable : FailureReason::CollisionAtTarget;
      out.detail = e.what();
      failed = true;
    }
  }

  if (!strict_configured) {
    trace.configured = cur;
    SettleResult s = settle(cur, "settle");
    trace.settled = s.scene;
    trace.traces = std::move(s.traces);
    trace.displaced = std::move(s.displaced);
  }
  trace.final_scene = mode == ExecutionMode::Strict ? cur : trace.settled;
  return trace;
}

}  // namespace stackeval
