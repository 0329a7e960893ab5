#include "stackeval/voxkb.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "stackeval/error.hpp"

namespace stackeval {

using json = nlohmann::json;

namespace {

constexpr const char* kFormatName = "stackeval-voxkb";
constexpr int kSupportedVersion = 1;

IntrinsicClass parse_class(const std::string& s) {
  if (s == "flat") return IntrinsicClass::Flat;
  if (s == "round") return IntrinsicClass::Round;
  if (s == "mixed") return IntrinsicClass::Mixed;
  throw Error(ErrorCode::InvalidKnowledgeBase, "unknown intrinsic_class '" + s + "'");
}

SurfaceClass parse_surface(const std::string& s) {
  if (s == "flat") return SurfaceClass::Flat;
  if (s == "round") return SurfaceClass::Round;
  if (s == "point") return SurfaceClass::Point;
  throw Error(ErrorCode::InvalidKnowledgeBase, "unknown support surface '" + s + "'");
}

Behavior parse_behavior(const std::string& s) {
  if (s == "roll") return Behavior::Roll;
  if (s == "slide") return Behavior::Slide;
  if (s == "stack_target") return Behavior::StackTarget;
  if (s == "stackable") return Behavior::Stackable;
  throw Error(ErrorCode::InvalidKnowledgeBase, "unknown behavior '" + s + "'");
}

GeometryKind parse_geometry(const std::string& s) {
  if (s == "box") return GeometryKind::Box;
  if (s == "ellipsoid") return GeometryKind::Ellipsoid;
  if (s == "cylinder") return GeometryKind::Cylinder;
  if (s == "capsule") return GeometryKind::Capsule;
  throw Error(ErrorCode::InvalidKnowledgeBase, "unknown geometry '" + s + "'");
}

Habitat parse_habitat(const json& j) {
  Habitat h;
  h.up_axis = parse_axis(j.at("up_axis").get<std::string>());
  h.support = parse_surface(j.at("support").get<std::string>());
  const std::string footprint = j.value("footprint", std::string("rect"));
  if (footprint == "rect") {
    h.footprint = FootprintShape::Rect;
  } else if (footprint == "disk") {
    h.footprint = FootprintShape::Disk;
  } else {
    throw Error(ErrorCode::InvalidKnowledgeBase, "unknown footprint '" + footprint + "'");
  }
  h.footprint_scale = j.value("footprint_scale", 1.0);
  for (const auto& b : j.at("afforded")) h.afforded.insert(parse_behavior(b.get<std::string>()));
  return h;
}

Voxeme parse_voxeme(const json& j) {
  Voxeme v;
  v.name = j.at("name").get<std::string>();
  v.geometry = parse_geometry(j.value("geometry", std::string("box")));
  v.intrinsic_class = parse_class(j.at("intrinsic_class").get<std::string>());
  for (const auto& a : j.value("symmetry_axes", json::array())) {
    v.symmetry_axes.push_back(parse_principal_axis(a.get<std::string>()));
  }
  if (j.contains("default_dims")) {
    const auto d = j.at("default_dims").get<std::vector<double>>();
    if (d.size() != 3) throw Error(ErrorCode::InvalidKnowledgeBase, v.name + ": default_dims needs 3 values");
    v.default_dims = Vec3(d[0], d[1], d[2]);
  }
  for (const auto& h : j.at("habitats")) v.habitats.push_back(parse_habitat(h));
  return v;
}

double deviation(const Habitat& h, const Rotation& rotation) {
  return angle_between(rotation * axis_vector(h.up_axis), world_up());
}

}  // namespace

std::string_view to_string(IntrinsicClass c) {
  switch (c) {
    case IntrinsicClass::Flat: return "flat";
    case IntrinsicClass::Round: return "round";
    case IntrinsicClass::Mixed: return "mixed";
  }
  return "flat";
}

std::string_view to_string(SurfaceClass c) {
  switch (c) {
    case SurfaceClass::Flat: return "flat";
    case SurfaceClass::Round: return "round";
    case SurfaceClass::Point: return "point";
  }
  return "flat";
}

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::Roll: return "roll";
    case Behavior::Slide: return "slide";
    case Behavior::StackTarget: return "stack_target";
    case Behavior::Stackable: return "stackable";
  }
  return "roll";
}

const Habitat& unaligned_habitat() {
  static const Habitat kUnaligned{Axis::PosY, SurfaceClass::Point, FootprintShape::Rect, 0.0, {}};
  return kUnaligned;
}

std::optional<std::size_t> active_habitat_index(const Voxeme& voxeme, const Rotation& rotation,
                                                double tolerance) {
  std::optional<std::size_t> best_flat;
  double best_flat_dev = 0.0;
  std::optional<std::size_t> best_round;
  double best_round_dev = 0.0;
  for (std::size_t i = 0; i < voxeme.habitats.size(); ++i) {
    const Habitat& h = voxeme.habitats[i];
    const double dev = deviation(h, rotation);
    if (h.support == SurfaceClass::Round) {
      if (!best_round || dev < best_round_dev) {
        best_round = i;
        best_round_dev = dev;
      }
    } else if (dev <= tolerance && (!best_flat || dev < best_flat_dev)) {
      best_flat = i;
      best_flat_dev = dev;
    }
  }
  return best_flat ? best_flat : best_round;
}

const Habitat& active_habitat(const Voxeme& voxeme, const Rotation& rotation, double tolerance) {
  const auto index = active_habitat_index(voxeme, rotation, tolerance);
  return index ? voxeme.habitats[*index] : unaligned_habitat();
}

Rotation habitat_rotation(const Habitat& habitat) { return rotation_aligning(habitat.up_axis); }

void validate(const Voxeme& v) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidKnowledgeBase, "voxeme '" + v.name + "': " + what);
  };
  if (v.name.empty()) fail("empty name");
  if (v.habitats.empty()) fail("needs at least one habitat");
  if ((v.default_dims.array() <= 0.0).any()) fail("default_dims must be positive");
  std::set<SurfaceClass> classes;
  for (const Habitat& h : v.habitats) {
    classes.insert(h.support);
    if (h.support == SurfaceClass::Flat && !h.affords(Behavior::StackTarget)) {
      fail("flat habitat must afford stack_target");
    }
    if (h.support == SurfaceClass::Round &&
        (!h.affords(Behavior::Roll) || h.affords(Behavior::StackTarget))) {
      fail("round habitat must afford roll and not stack_target");
    }
    if (h.footprint_scale <= 0.0 || h.footprint_scale > 1.0) fail("footprint_scale must be in (0, 1]");
  }
  switch (v.intrinsic_class) {
    case IntrinsicClass::Mixed:
      if (v.habitats.size() < 2 || classes.size() < 2) {
        fail("mixed voxeme needs habitats with different support classes");
      }
      break;
    case IntrinsicClass::Flat:
      if (classes.count(SurfaceClass::Round)) fail("flat voxeme has a round habitat");
      break;
    case IntrinsicClass::Round:
      if (classes.count(SurfaceClass::Flat)) fail("round voxeme has a flat habitat");
      break;
  }
}

VoxKb VoxKb::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidKnowledgeBase, std::string("malformed JSON: ") + e.what());
  }
  VoxKb kb;
  try {
    if (doc.value("format", std::string()) != kFormatName) {
      throw Error(ErrorCode::InvalidKnowledgeBase, "missing format tag 'stackeval-voxkb'");
    }
    kb.version_ = doc.at("version").get<int>();
    if (kb.version_ != kSupportedVersion) {
      throw Error(ErrorCode::InvalidKnowledgeBase,
                  "unsupported version " + std::to_string(kb.version_));
    }
    for (const auto& entry : doc.at("voxemes")) {
      Voxeme v = parse_voxeme(entry);
      validate(v);
      const std::string name = v.name;
      if (!kb.voxemes_.emplace(name, std::move(v)).second) {
        throw Error(ErrorCode::InvalidKnowledgeBase, "duplicate voxeme '" + name + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidKnowledgeBase, e.what());
  }
  return kb;
}

VoxKb VoxKb::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open knowledge base " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::filesystem::path VoxKb::default_path() {
  return std::filesystem::path(STACKEVAL_DATA_DIR) / "data" / "voxkb.json";
}

std::shared_ptr<const VoxKb> VoxKb::shared_default() {
  static std::once_flag once;
  static std::shared_ptr<const VoxKb> kb;
  std::call_once(once, [] { kb = std::make_shared<const VoxKb>(load(default_path())); });
  return kb;
}

const Voxeme& VoxKb::lookup(std::string_view name) const {
  auto it = voxemes_.find(name);
  if (it == voxemes_.end()) throw Error(ErrorCode::UnknownShape, std::string(name));
  return it->second;
}

bool VoxKb::contains(std::string_view name) const { return voxemes_.find(name) != voxemes_.end(); }

std::vector<std::string> VoxKb::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : voxemes_) out.push_back(name);
  return out;
}

}  // namespace stackeval
