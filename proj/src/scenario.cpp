#include "stackeval/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stackeval/error.hpp"
#include "stackeval/physics.hpp"

namespace stackeval {

using json = nlohmann::json;

namespace {

constexpr const char* kFormatName = "stackeval-scenario";
constexpr int kVersion = 1;

Vec3 read_vec3(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(ErrorCode::InvalidSpec, std::string(what) + " needs 3 values");
  return Vec3(v[0], v[1], v[2]);
}

json write_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Rotation read_rotation(const json& o) {
  if (o.contains("up_axis")) return rotation_aligning(parse_axis(o.at("up_axis").get<std::string>()));
  if (o.contains("rotation")) {
    const auto q = o.at("rotation").get<std::vector<double>>();
    if (q.size() != 4) throw Error(ErrorCode::InvalidSpec, "rotation needs [w, x, y, z]");
    Rotation r(q[0], q[1], q[2], q[3]);
    if (r.norm() == 0.0) throw Error(ErrorCode::InvalidSpec, "zero rotation quaternion");
    return r.normalized();
  }
  return Rotation::Identity();
}

void write_rotation(json& o, const Rotation& r) {
  static constexpr Axis kAll[] = {Axis::PosY, Axis::NegY, Axis::PosX,
                                  Axis::NegX, Axis::PosZ, Axis::NegZ};
  for (Axis a : kAll) {
    if (exactly_equal(r, rotation_aligning(a))) {
      if (a != Axis::PosY) o["up_axis"] = std::string(axis_name(a));
      return;
    }
  }
  o["rotation"] = json::array({r.w(), r.x(), r.y(), r.z()});
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed JSON: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    if (doc.value("format", std::string()) != kFormatName) {
      throw Error(ErrorCode::InvalidSpec, "missing format tag 'stackeval-scenario'");
    }
    if (doc.value("version", 0) != kVersion) throw Error(ErrorCode::InvalidSpec, "unsupported version");
    spec.name = doc.at("name").get<std::string>();
    spec.description = doc.value("description", std::string());
    spec.completed_steps = doc.value("completed_steps", std::string());
    spec.prompt_reconstructed = doc.value("prompt_reconstructed", false);
    if (doc.contains("agent")) {
      const json& a = doc.at("agent");
      if (a.contains("position")) spec.agent.position = read_vec3(a.at("position"), "agent.position");
      if (a.contains("facing")) spec.agent.facing = read_vec3(a.at("facing"), "agent.facing");
      spec.agent.jump_height = a.value("jump_height", 1.0);
    }
    for (const json& o : doc.value("objects", json::array())) {
      SceneObject obj;
      obj.id = o.at("id").get<std::string>();
      obj.shape = o.at("shape").get<std::string>();
      obj.dims = read_vec3(o.at("dims"), "dims");
      obj.position = read_vec3(o.at("position"), "position");
      obj.rotation = read_rotation(o);
      obj.role = parse_role(o.value("role", std::string("interactable")));
      obj.movable = o.value("movable", obj.role == ObjectRole::Interactable);
      obj.color = o.value("color", std::string());
      spec.objects.push_back(std::move(obj));
    }
    for (const json& r : doc.value("references", json::array())) {
      spec.references.push_back(r.get<std::vector<std::string>>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kVersion;
  doc["name"] = spec.name;
  if (!spec.description.empty()) doc["description"] = spec.description;
  if (!spec.completed_steps.empty()) doc["completed_steps"] = spec.completed_steps;
  if (spec.prompt_reconstructed) doc["prompt_reconstructed"] = true;
  doc["agent"] = {{"position", write_vec3(spec.agent.position)},
                  {"facing", write_vec3(spec.agent.facing)},
                  {"jump_height", spec.agent.jump_height}};
  json objects = json::array();
  for (const SceneObject& o : spec.objects) {
    json j = {{"id", o.id},
              {"shape", o.shape},
              {"dims", write_vec3(o.dims)},
              {"position", write_vec3(o.position)},
              {"role", std::string(to_string(o.role))},
              {"movable", o.movable}};
    if (!o.color.empty()) j["color"] = o.color;
    write_rotation(j, o.rotation);
    objects.push_back(std::move(j));
  }
  doc["objects"] = std::move(objects);
  doc["references"] = spec.references;
  return doc.dump(2) + "\n";
}

Scene spawn(const ScenarioSpec& spec, std::shared_ptr<const VoxKb> kb) {
  if (!(spec.agent.jump_height > 0.0)) throw Error(ErrorCode::InvalidSpec, "jump_height must be positive");
  Scene scene(std::move(kb), spec.agent);
  for (const SceneObject& o : spec.objects) {
    if (!scene.kb().contains(o.shape)) throw Error(ErrorCode::InvalidSpec, "unknown shape '" + o.shape + "'");
    if ((o.dims.array() <= 0.0).any()) throw Error(ErrorCode::InvalidSpec, "'" + o.id + "' has non-positive dims");
    if (o.role == ObjectRole::Platform && o.movable) {
      throw Error(ErrorCode::InvalidSpec, "platform '" + o.id + "' must not be movable");
    }
    if (o.role == ObjectRole::Interactable && !o.movable) {
      throw Error(ErrorCode::InvalidSpec, "interactable '" + o.id + "' must be movable");
    }
    if (o.position.y() < -kContactTolerance) throw Error(ErrorCode::InvalidSpec, "'" + o.id + "' is below ground");
    const auto hits = collisions(scene, o);
    if (!hits.empty()) {
      throw Error(ErrorCode::InvalidSpec, "'" + o.id + "' overlaps '" + hits.front() + "'");
    }
    scene.add(o);
  }
  return scene;
}

ScenarioRegistry::ScenarioRegistry(std::filesystem::path dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ScenarioSpec spec = load_scenario(entry.path());
    const std::string name = spec.name;
    specs_.emplace(name, std::move(spec));
  }
}

std::filesystem::path ScenarioRegistry::default_dir() {
  return std::filesystem::path(STACKEVAL_DATA_DIR) / "scenarios";
}

std::vector<std::string> ScenarioRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : specs_) out.push_back(name);
  return out;
}

bool ScenarioRegistry::contains(std::string_view name) const { return specs_.find(name) != specs_.end(); }

const ScenarioSpec& ScenarioRegistry::get(std::string_view name) const {
  auto it = specs_.find(name);
  if (it == specs_.end()) throw Error(ErrorCode::UnknownScenario, std::string(name));
  return it->second;
}

}  // namespace stackeval
