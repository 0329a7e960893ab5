#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stackeval/scene.hpp"

namespace stackeval {

// Parsed scenario file (format "stackeval-scenario", see docs/formats.md).
struct ScenarioSpec {
  std::string name;
  std::string description;
  Agent agent;
  std::vector<SceneObject> objects;
  // Admissible correct object sets, as shape multisets.
  std::vector<std::vector<std::string>> references;
  // Description of steps already completed, for the partial-solution prompt.
  std::string completed_steps;
  // True when the prompt text for this scene is not quoted verbatim.
  bool prompt_reconstructed = false;
};

ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioSpec& spec);

// Throws InvalidSpec on non-positive dims, role/movable mismatch, objects
// below ground or interpenetrating objects.
Scene spawn(const ScenarioSpec& spec, std::shared_ptr<const VoxKb> kb);

class ScenarioRegistry {
 public:
  explicit ScenarioRegistry(std::filesystem::path dir = default_dir());
  static std::filesystem::path default_dir();

  std::vector<std::string> names() const;
  bool contains(std::string_view name) const;
  // Throws UnknownScenario.
  const ScenarioSpec& get(std::string_view name) const;

 private:
  std::map<std::string, ScenarioSpec, std::less<>> specs_;
};

}  // namespace stackeval
