#include "stackeval/plan.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace stackeval {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

const char* kOrdinals[] = {"", "first", "second", "third", "fourth", "fifth",
                           "sixth", "seventh", "eighth", "ninth", "tenth"};

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

bool starts_with_vowel(const std::string& s) {
  return !s.empty() && std::string_view("aeiou").find(s.front()) != std::string_view::npos;
}

std::string plural(const std::string& noun) { return noun + "s"; }

std::string with_orientation(const std::string& phrase, const OrientationRef& o) {
  if (o.kind == OrientationKind::Keep) return phrase;
  return phrase + " " + render(o);
}

}  // namespace

bool is_ignore(const Action& action) { return std::holds_alternative<Ignore>(action); }

std::string_view action_name(const Action& action) {
  return std::visit(Overload{[](const PlaceOn&) { return std::string_view("place_on"); },
                             [](const PlaceAt&) { return std::string_view("place_at"); },
                             [](const Rotate&) { return std::string_view("rotate"); },
                             [](const Climb&) { return std::string_view("climb"); },
                             [](const Ignore&) { return std::string_view("ignore"); }},
                    action);
}

std::vector<ObjectRef> selected_objects(const Plan& plan) {
  std::vector<ObjectRef> out;
  for (const Action& a : plan.steps) {
    std::visit(Overload{[&](const PlaceOn& s) {
                          out.push_back(s.object);
                          out.push_back(s.base);
                        },
                        [&](const PlaceAt& s) {
                          out.push_back(s.object);
                          if (s.region.anchor) out.push_back(*s.region.anchor);
                        },
                        [&](const Rotate& s) { out.push_back(s.object); },
                        [&](const Climb& s) { out.push_back(s.target); },
                        [](const Ignore&) {}},
               a);
  }
  return out;
}

std::string render(const ObjectRef& ref) {
  if (!ref.tag.empty()) return "#" + ref.tag;
  if (ref.determiner == Determiner::Anaphor) return "it";
  std::vector<std::string> words;
  if (ref.group) {
    words.push_back("the stack of");
    words.push_back(plural(ref.shape));
    return words[0] + " " + words[1];
  }
  if (ref.ordinal > 0 && ref.ordinal <= 10) words.push_back(kOrdinals[ref.ordinal]);
  switch (ref.side) {
    case SideDescriptor::Left: words.push_back("left"); break;
    case SideDescriptor::Right: words.push_back("right"); break;
    case SideDescriptor::Front: words.push_back("front"); break;
    case SideDescriptor::Behind: words.push_back("back"); break;
    case SideDescriptor::None: break;
  }
  if (ref.size == SizeDescriptor::Small) words.push_back("small");
  if (ref.size == SizeDescriptor::Large) words.push_back("large");
  if (!ref.color.empty()) words.push_back(ref.color);
  words.push_back(ref.shape);

  std::string body;
  for (const auto& w : words) body += (body.empty() ? "" : " ") + w;
  switch (ref.determiner) {
    case Determiner::Indefinite: return (starts_with_vowel(body) ? "an " : "a ") + body;
    case Determiner::Other: return "the other " + body;
    default: return "the " + body;
  }
}

std::string render(const OrientationRef& o) {
  switch (o.kind) {
    case OrientationKind::Keep: return "";
    case OrientationKind::Upright: return "upright";
    case OrientationKind::UpsideDown: return "upside down";
    case OrientationKind::OnSide: return "on its side";
    case OrientationKind::FlatSideDown: return "flat side down";
    case OrientationKind::RoundSideDown: return "round side down";
    case OrientationKind::AxisUp: return "with its " + std::string(axis_name(o.axis)) + " axis up";
  }
  return "";
}

std::string render(const Region& r) {
  const std::string anchor = r.anchor ? render(*r.anchor) : std::string("the ground");
  switch (r.kind) {
    case RegionKind::Ground: return "on the ground";
    case RegionKind::NextTo: return "next to " + anchor;
    case RegionKind::InFrontOf: return "in front of " + anchor;
    case RegionKind::Behind: return "behind " + anchor;
    case RegionKind::SameAs: return "in the same place as " + anchor;
    case RegionKind::Coordinates:
      return "at (" + shortest(r.point.x()) + ", " + shortest(r.point.y()) + ", " +
             shortest(r.point.z()) + ")";
  }
  return "";
}

std::string render(const Action& action) {
  return std::visit(
      Overload{[](const PlaceOn& s) {
                 return with_orientation("Place " + render(s.object), s.orientation) + " on top of " +
                        render(s.base) + ".";
               },
               [](const PlaceAt& s) {
                 return with_orientation("Place " + render(s.object), s.orientation) + " " +
                        render(s.region) + ".";
               },
               [](const Rotate& s) { return with_orientation("Rotate " + render(s.object), s.orientation) + "."; },
               [](const Climb& s) { return "Climb onto " + render(s.target) + "."; },
               [](const Ignore& s) { return s.text; }},
      action);
}

std::string render(const Plan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    out += std::to_string(i + 1) + ". " + render(plan.steps[i]) + "\n";
  }
  return out;
}

std::vector<ObjectId> selected_ids(const GroundedPlan& plan, const Scene& scene) {
  std::vector<ObjectId> out;
  std::set<ObjectId> seen;
  for (std::size_t i = 0; i < plan.steps.size() && i < plan.plan.steps.size(); ++i) {
    if (is_ignore(plan.plan.steps[i])) continue;
    const GroundedStep& step = plan.steps[i];
    if (step.error) continue;
    auto note = [&](const ObjectId& id) {
      const SceneObject* o = scene.find(id);
      if (o && o->role == ObjectRole::Platform) return;
      if (seen.insert(id).second) out.push_back(id);
    };
    for (const auto& id : step.objects) note(id);
    for (const auto& id : step.anchors) note(id);
  }
  return out;
}

}  // namespace stackeval
