#include "stackeval/resolver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stackeval/physics.hpp"
#include "stackeval/rng.hpp"

namespace stackeval {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

class Binder {
 public:
  explicit Binder(const Scene& scene) : scene_(scene) {}

  // `self` is the object the step moves; a plain noun phrase in the anchor
  // slot prefers another instance.
  std::vector<ObjectId> bind(const ObjectRef& ref, const std::vector<ObjectId>& self = {}) {
    std::vector<ObjectId> ids = lookup(ref, self);
    for (const auto& id : ids) {
      used_.insert(id);
      recent_[scene_.at(id).shape] = id;
      if (scene_.at(id).role == ObjectRole::Platform) recent_["platform"] = id;
      last_mentioned_ = id;
    }
    return ids;
  }

  void moved(const ObjectId& id) { last_moved_ = id; }

 private:
  [[noreturn]] static void unknown(const std::string& what) {
    throw Error(ErrorCode::UnknownObject, "no object matches '" + what + "'");
  }

  double distance(const SceneObject& o) const {
    return (o.position - scene_.agent().position).norm();
  }

  std::vector<const SceneObject*> pool(const ObjectRef& ref) const {
    std::vector<const SceneObject*> out;
    for (const SceneObject& o : scene_.objects()) {
      const bool kind = ref.shape == "platform" ? o.role == ObjectRole::Platform
                                                 : o.role == ObjectRole::Interactable && o.shape == ref.shape;
      if (!kind) continue;
      if (!ref.color.empty() && o.color != ref.color) continue;
      out.push_back(&o);
    }
    std::stable_sort(out.begin(), out.end(), [&](const SceneObject* a, const SceneObject* b) {
      const double da = distance(*a);
      const double db = distance(*b);
      return da < db || (da == db && a->id < b->id);
    });
    return out;
  }

  std::vector<ObjectId> stacked(const std::vector<const SceneObject*>& candidates) const {
    std::vector<ObjectId> out;
    for (const SceneObject* a : candidates) {
      const Voxeme& va = scene_.voxeme_of(*a);
      const Aabb ba = world_bounds(*a, va);
      for (const SceneObject* b : candidates) {
        if (a == b) continue;
        const Aabb bb = world_bounds(*b, scene_.voxeme_of(*b));
        const bool touching = std::abs(ba.max.y() - bb.min.y()) <= kContactTolerance ||
                              std::abs(bb.max.y() - ba.min.y()) <= kContactTolerance;
        if (touching && ba.overlap(bb, 0) > 0 && ba.overlap(bb, 2) > 0) {
          out.push_back(a->id);
          break;
        }
      }
    }
    return out;
  }

  std::vector<ObjectId> lookup(const ObjectRef& ref, const std::vector<ObjectId>& self) const {
    if (!ref.tag.empty()) {
      if (!scene_.contains(ref.tag)) unknown("#" + ref.tag);
      return {ref.tag};
    }
    if (ref.determiner == Determiner::Anaphor) {
      if (last_moved_) return {*last_moved_};
      if (last_mentioned_) return {*last_mentioned_};
      unknown("it");
    }
    auto candidates = pool(ref);
    if (candidates.empty()) unknown(render(ref));
    if (ref.group) {
      auto ids = stacked(candidates);
      if (ids.empty()) unknown(render(ref));
      return ids;
    }
    if (ref.ordinal > 0) {
      if (static_cast<std::size_t>(ref.ordinal) > candidates.size()) unknown(render(ref));
      return {candidates[static_cast<std::size_t>(ref.ordinal) - 1]->id};
    }
    if (ref.side != SideDescriptor::None || ref.size != SizeDescriptor::None) {
      return {extreme(ref, candidates)->id};
    }
    if (!self.empty() && candidates.size() > 1) {
      std::erase_if(candidates, [&](const SceneObject* c) { return c->id == self.front(); });
    }
    switch (ref.determiner) {
      case Determiner::Definite: {
        auto it = recent_.find(ref.shape);
        if (it != recent_.end()) {
          for (const SceneObject* c : candidates) {
            if (c->id == it->second) return {c->id};
          }
        }
        return {candidates.front()->id};
      }
      case Determiner::Indefinite:
        for (const SceneObject* c : candidates) {
          if (!used_.count(c->id)) return {c->id};
        }
        return {candidates.front()->id};
      case Determiner::Other:
        for (const SceneObject* c : candidates) {
          if (!used_.count(c->id)) return {c->id};
        }
        unknown(render(ref));
      case Determiner::Anaphor:
        break;
    }
    unknown(render(ref));
  }

  const SceneObject* extreme(const ObjectRef& ref, const std::vector<const SceneObject*>& candidates) const {
    const Agent& agent = scene_.agent();
    const Vec3 right = agent_right(agent);
    Vec3 facing = agent.facing;
    facing.y() = 0;
    facing = facing.norm() > 0 ? facing.normalized() : Vec3::UnitZ();
    auto score = [&](const SceneObject* o) {
      const Vec3 d = o->position - agent.position;
      switch (ref.side) {
        case SideDescriptor::Left: return -d.dot(right);
        case SideDescriptor::Right: return d.dot(right);
        case SideDescriptor::Front: return -d.dot(facing);
        case SideDescriptor::Behind: return d.dot(facing);
        case SideDescriptor::None: break;
      }
      const double volume = o->dims.prod();
      return ref.size == SizeDescriptor::Large ? volume : -volume;
    };
    const SceneObject* best = candidates.front();
    for (const SceneObject* c : candidates) {
      if (score(c) > score(best)) best = c;
    }
    return best;
  }

  const Scene& scene_;
  std::set<ObjectId> used_;
  std::map<std::string, ObjectId> recent_;
  std::optional<ObjectId> last_moved_;
  std::optional<ObjectId> last_mentioned_;
};

PlacementSample draw_sample(Rng& rng) {
  PlacementSample s;
  s.side_order = {0, 1, 2, 3};
  for (int i = 3; i > 0; --i) {
    const auto j = static_cast<int>(rng.index(static_cast<std::uint64_t>(i) + 1));
    std::swap(s.side_order[static_cast<std::size_t>(i)], s.side_order[static_cast<std::size_t>(j)]);
  }
  for (int k = 0; k < kGroundSamples; ++k) {
    const double radius = rng.uniform(1.5, 4.0);
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    s.ground.emplace_back(radius, angle);
  }
  return s;
}

}  // namespace

GroundedPlan resolve(const Plan& plan, const Scene& scene, std::uint64_t seed, ResolveOptions options) {
  GroundedPlan out;
  out.plan = plan;
  out.seed = seed;
  Rng rng(seed);
  Binder binder(scene);

  for (const Action& action : plan.steps) {
    GroundedStep step;
    step.sample = draw_sample(rng);
    try {
      std::visit(Overload{[&](const PlaceOn& a) {
                            step.objects = binder.bind(a.object);
                            step.anchors = binder.bind(a.base, step.objects);
                          },
                          [&](const PlaceAt& a) {
                            step.objects = binder.bind(a.object);
                            if (a.region.anchor) step.anchors = binder.bind(*a.region.anchor, step.objects);
                          },
                          [&](const Rotate& a) { step.objects = binder.bind(a.object); },
                          [&](const Climb& a) { step.objects = binder.bind(a.target); },
                          [](const Ignore&) {}},
                 action);
      if (!std::holds_alternative<Climb>(action) && !step.objects.empty()) binder.moved(step.objects.front());
    } catch (const Error& e) {
      if (!options.lenient || e.code() != ErrorCode::UnknownObject) throw;
      step.objects.clear();
      step.anchors.clear();
      step.error = e.code();
      step.error_message = e.what();
    }
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace stackeval
