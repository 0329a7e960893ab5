#include "stackeval/explorer.hpp"

#include <algorithm>
#include <cmath>

#include "stackeval/error.hpp"
#include "stackeval/resolver.hpp"
#include "stackeval/rng.hpp"

namespace stackeval {

namespace {

const ObjectId kAgentBody = "agent_body";

std::uint64_t mix(std::uint64_t seed, std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Vec3 jitter(Rng& rng) { return Vec3(rng.uniform(-kProbeJitter, kProbeJitter), 0.0, rng.uniform(-kProbeJitter, kProbeJitter)); }

double planar_distance(const Vec3& a, const Vec3& b) { return std::hypot(a.x() - b.x(), a.z() - b.z()); }

std::vector<const SceneObject*> nearest_first(const Scene& scene, ObjectRole role) {
  std::vector<const SceneObject*> out;
  for (const auto& o : scene.objects()) {
    if (o.role == role) out.push_back(&o);
  }
  const Vec3 at = scene.agent().position;
  std::sort(out.begin(), out.end(), [&](const SceneObject* a, const SceneObject* b) {
    const double da = planar_distance(a->position, at);
    const double db = planar_distance(b->position, at);
    if (da != db) return da < db;
    return a->id < b->id;
  });
  return out;
}

ObjectRef tag(const ObjectId& id) {
  ObjectRef r;
  r.tag = id;
  return r;
}

OrientationRef orientation_for(Axis up) {
  if (up == Axis::PosY) return {OrientationKind::Upright, Axis::PosY};
  return {OrientationKind::AxisUp, up};
}

struct FlatObject {
  ObjectId id;
  Axis up = Axis::PosY;
  Vec3 half = Vec3::Zero();
};

struct Face {
  int axis;     // 0 = x, 2 = z
  double sign;  // outward
};

constexpr Face kFaces[] = {{0, 1.0}, {0, -1.0}, {2, 1.0}, {2, -1.0}};

Plan staircase_plan(const std::vector<FlatObject>& objects, int columns, const SceneObject& platform,
                    const Voxeme& platform_voxeme, const Face& face, bool climb) {
  // column c holds columns - c objects; c = 0 touches the platform
  std::vector<std::vector<const FlatObject*>> stack(static_cast<std::size_t>(columns));
  std::size_t next = 0;
  for (int level = 0; level < columns; ++level) {
    for (int c = 0; c < columns - level; ++c) stack[static_cast<std::size_t>(c)].push_back(&objects[next++]);
  }

  const Aabb bounds = world_bounds(platform, platform_voxeme);
  const int cross = face.axis == 0 ? 2 : 0;
  const double cross_at = 0.5 * (bounds.min[cross] + bounds.max[cross]);
  double edge = face.sign > 0 ? bounds.max[face.axis] : bounds.min[face.axis];

  Plan plan;
  for (const auto& column : stack) {
    double half = 0.0;
    for (const FlatObject* o : column) half = std::max(half, o->half[face.axis]);
    Vec3 point = Vec3::Zero();
    point[face.axis] = edge + face.sign * half;
    point[cross] = cross_at;
    edge += face.sign * 2.0 * half;

    PlaceAt step;
    step.object = tag(column.front()->id);
    step.region.kind = RegionKind::Coordinates;
    step.region.point = point;
    step.orientation = orientation_for(column.front()->up);
    plan.steps.emplace_back(step);
  }
  for (int level = 1; level < columns; ++level) {
    for (const auto& column : stack) {
      if (static_cast<int>(column.size()) <= level) continue;
      PlaceOn step;
      step.object = tag(column[static_cast<std::size_t>(level)]->id);
      step.base = tag(column[static_cast<std::size_t>(level - 1)]->id);
      step.orientation = orientation_for(column[static_cast<std::size_t>(level)]->up);
      plan.steps.emplace_back(step);
    }
  }
  if (climb) plan.steps.emplace_back(Climb{tag(platform.id)});
  return plan;
}

}  // namespace

std::optional<std::size_t> detect_failure(const ExecutionTrace& trace) { return trace.failure_step(); }

TrajectoryTrace stack_probe(const Scene& scene, const ObjectId& id, const ProbeOptions& options) {
  const SceneObject& original = scene.at(id);
  if (!original.movable) throw Error(ErrorCode::Immovable, "'" + id + "' cannot be moved");
  const Agent& agent = scene.agent();

  SceneObject body;
  body.id = kAgentBody;
  body.shape = "cube";
  body.dims = Vec3::Ones();
  body.position = agent.position;
  body.movable = false;
  body.role = ObjectRole::AgentBody;

  SceneObject probe = original;
  if (options.rotation) probe.rotation = *options.rotation;
  probe.position = agent.position + Vec3(options.jitter.x(), 1.0, options.jitter.z());

  Scene arena(scene.kb_ptr(), agent, {body, probe});
  const SettleResult settled = settle(arena, "probe");
  for (const auto& t : settled.traces) {
    if (t.object_id == id) return t;
  }
  const Vec3 com = center_of_mass(probe, arena.voxeme_of(probe));
  TrajectoryTrace trace;
  trace.object_id = id;
  trace.action_context = "probe";
  trace.samples = {{0, com, probe.rotation}, {1, com, probe.rotation}};
  return trace;
}

std::vector<LabeledFeatures> probe_arena(const VoxKb& kb, std::uint64_t seed, int samples) {
  auto shared = std::make_shared<VoxKb>(kb);
  Rng rng(seed);
  std::vector<LabeledFeatures> out;
  for (const auto& name : kb.names()) {
    const Voxeme& v = kb.lookup(name);
    if (v.intrinsic_class == IntrinsicClass::Mixed) continue;
    const GroundLabel label = v.intrinsic_class == IntrinsicClass::Flat ? GroundLabel::Flat : GroundLabel::Round;
    SceneObject object;
    object.id = name;
    object.shape = name;
    object.dims = v.default_dims;
    object.position = Vec3(0.0, 0.0, 3.0);
    const Scene scene(shared, Agent{}, {object});
    for (const Habitat& h : v.habitats) {
      for (int k = 0; k < samples; ++k) {
        ProbeOptions options;
        options.rotation = habitat_rotation(h);
        options.jitter = jitter(rng);
        const TrajectoryTrace trace = stack_probe(scene, name, options);
        SceneObject held = object;
        held.rotation = *options.rotation;
        LabeledFeatures f;
        f.features = featurize(trace, held, v);
        f.label = label;
        f.shape = name;
        f.orientation = std::string(axis_name(h.up_axis));
        f.trace_id = name + "/" + f.orientation + "/" + std::to_string(k);
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

GroundingModel train_default_model(const std::shared_ptr<const VoxKb>& kb, std::uint64_t seed) {
  return train_similarity(probe_arena(*kb, seed), seed, *kb);
}

HabitatGrounding ground_object(const Scene& scene, const ObjectId& id, const Rotation& rotation,
                               const GroundingModel& model, std::uint64_t seed, int samples) {
  const SceneObject& object = scene.at(id);
  const Voxeme& v = scene.voxeme_of(object);
  SceneObject held = object;
  held.rotation = rotation;

  HabitatGrounding g;
  g.object = id;
  g.shape = object.shape;
  g.orientation = std::string(axis_name(active_habitat(v, rotation).up_axis));
  Rng rng(mix(seed, id + "@" + g.orientation));
  int flat = 0;
  for (int k = 0; k < samples; ++k) {
    ProbeOptions options;
    options.rotation = rotation;
    options.jitter = jitter(rng);
    const Grounding result = ground(model, model.embed(featurize(stack_probe(scene, id, options), held, v)));
    flat += result.label == GroundLabel::Flat ? 1 : -1;
    if (k == 0) {
      for (const Neighbor& n : result.neighbors) g.neighbors.push_back(model.references[n.index].trace_id);
    }
  }
  g.label = flat > 0 ? GroundLabel::Flat : GroundLabel::Round;
  return g;
}

HabitatChoice determine_habitat(const Scene& scene, const ObjectId& id, const GroundingModel& model,
                                std::uint64_t seed) {
  const SceneObject& object = scene.at(id);
  if (!object.movable) throw Error(ErrorCode::Immovable, "'" + id + "' cannot be moved");
  HabitatChoice choice;
  for (const Habitat& h : scene.voxeme_of(object).habitats) {
    const Rotation r = habitat_rotation(h);
    HabitatGrounding g = ground_object(scene, id, r, model, seed);
    g.orientation = std::string(axis_name(h.up_axis));
    choice.tried.push_back(g);
    if (g.label == GroundLabel::Flat) {
      choice.rotation = r;
      choice.up_axis = h.up_axis;
      return choice;
    }
  }
  throw Error(ErrorCode::NoFlatHabitat, "no habitat of '" + id + "' grounds flat");
}

Staircase synthesize_staircase(const Scene& scene, double target_height, double jump,
                               const GroundingModel& model, std::uint64_t seed) {
  if (!(target_height > 0.0) || !(jump > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "target height and jump must be positive");
  }
  Staircase result;
  const auto platforms = nearest_first(scene, ObjectRole::Platform);
  if (platforms.empty()) throw Error(ErrorCode::Unsolvable, "no platform to climb");
  const SceneObject& platform = *platforms.front();
  const Voxeme& platform_voxeme = scene.voxeme_of(platform);
  result.platform = platform.id;

  std::vector<FlatObject> flat;
  for (const SceneObject* o : nearest_first(scene, ObjectRole::Interactable)) {
    if (!o->movable) continue;
    try {
      HabitatChoice c = determine_habitat(scene, o->id, model, seed);
      result.decisions.insert(result.decisions.end(), c.tried.begin(), c.tried.end());
      SceneObject held = *o;
      held.rotation = c.rotation;
      flat.push_back({o->id, c.up_axis, world_half_extents(held, scene.voxeme_of(held))});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFlatHabitat) throw;
      const Voxeme& v = scene.voxeme_of(*o);
      for (const Habitat& h : v.habitats) {
        HabitatGrounding g = ground_object(scene, o->id, habitat_rotation(h), model, seed);
        g.orientation = std::string(axis_name(h.up_axis));
        result.decisions.push_back(g);
      }
    }
  }

  const int columns = std::max(1, static_cast<int>(std::ceil((target_height - kContactTolerance) / jump)));
  const std::size_t needed = static_cast<std::size_t>(columns * (columns + 1) / 2);
  if (flat.size() < needed) {
    throw Error(ErrorCode::Unsolvable, "need " + std::to_string(needed) + " flat objects, found " +
                                           std::to_string(flat.size()));
  }
  flat.resize(needed);

  const bool climb = top_height(platform, platform_voxeme) <= target_height + kContactTolerance;
  Scene probe = scene;
  probe.agent().jump_height = jump;
  for (const Face& face : kFaces) {
    Plan plan = staircase_plan(flat, columns, platform, platform_voxeme, face, climb);
    const GroundedPlan grounded = resolve(plan, probe, seed);
    const ExecutionTrace trace = operationalize(grounded, probe, ExecutionMode::Strict);
    if (trace.failure_step()) continue;
    if (stability(trace.configured, trace.settled, trace.placed) < 1.0) continue;
    if (!reachable(trace.final_scene, probe.agent(), target_height).reachable) continue;
    result.plan = std::move(plan);
    return result;
  }
  throw Error(ErrorCode::Unsolvable, "no face of '" + platform.id + "' admits a staircase");
}

Exploration explore(const Scene& scene, const GroundedPlan& plan,
                    const std::vector<std::vector<std::string>>& references, const GroundingModel& model,
                    std::uint64_t seed) {
  Exploration out;
  const auto platforms = nearest_first(scene, ObjectRole::Platform);
  const ExecutionTrace first = operationalize(plan, scene, ExecutionMode::Strict);
  out.trigger = detect_failure(first);
  if (!out.trigger) {
    out.report = report(first, plan, references);
    if (!platforms.empty()) {
      const SceneObject& p = *platforms.front();
      out.reach = reachable(first.final_scene, scene.agent(), top_height(p, scene.voxeme_of(p)), p.id);
    }
    return out;
  }

  if (platforms.empty()) throw Error(ErrorCode::Unsolvable, "no platform to climb");
  const SceneObject& platform = *platforms.front();
  const double target = top_height(platform, scene.voxeme_of(platform));

  Staircase stairs = synthesize_staircase(scene, target, scene.agent().jump_height, model, seed);
  out.decisions = std::move(stairs.decisions);
  const GroundedPlan grounded = resolve(stairs.plan, scene, seed);
  const ExecutionTrace trace = operationalize(grounded, scene, ExecutionMode::Strict);
  out.report = report(trace, grounded, references);
  out.reach = reachable(trace.final_scene, scene.agent(), target, platform.id);
  out.plan = std::move(stairs.plan);
  return out;
}

}  // namespace stackeval
