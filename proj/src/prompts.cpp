#include "stackeval/prompts.hpp"

#include <charconv>
#include <map>

#include "stackeval/error.hpp"

namespace stackeval {

const std::string_view kCanonicalPrompt =
    "You need to get to the top of a platform that is 2 meters high. The highest you can jump is 1 meter. "
    "You have two blue cubes that are both 1 meter long on all sides, a blue sphere that is 1 meter in "
    "diameter, and a blue cylinder whose major axis is 1 meter long. How can you get to the top of the "
    "platform?";

namespace {

std::string number(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string meters(double v) { return number(v) + (v == 1.0 ? " meter" : " meters"); }

std::string count_word(int n) {
  static const char* words[] = {"no", "a", "two", "three", "four", "five", "six", "seven", "eight", "nine"};
  return n < 10 ? words[n] : std::to_string(n);
}

std::string describe(const std::string& color, const std::string& shape, int n, const Vec3& dims) {
  const std::string lead = count_word(n) + " " + (color.empty() ? "" : color + " ");
  const std::string noun = n == 1 ? shape : shape + "s";
  if (shape == "cube") {
    return lead + noun + (n == 1 ? " that is " : " that are both ") + meters(dims.x()) + " long on all sides";
  }
  if (shape == "sphere") return lead + noun + (n == 1 ? " that is " : " that are ") + meters(dims.x()) + " in diameter";
  if (shape == "cylinder") {
    return lead + noun + (n == 1 ? " whose major axis is " : " whose major axes are ") + meters(dims.y()) + " long";
  }
  return lead + noun + (n == 1 ? " that is " : " that are ") + meters(dims.y()) + " tall";
}

// Inventory and platform height read off the scene.
std::string reconstructed_prompt(const ScenarioSpec& spec) {
  double height = 0.0;
  std::map<std::pair<std::string, std::string>, std::pair<int, Vec3>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& o : spec.objects) {
    if (o.role == ObjectRole::Platform) height = std::max(height, o.position.y() + o.dims.y());
    if (o.role != ObjectRole::Interactable) continue;
    const auto key = std::make_pair(o.color, o.shape);
    auto [it, fresh] = groups.try_emplace(key, 0, o.dims);
    if (fresh) order.push_back(key);
    ++it->second.first;
  }
  std::string inventory;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [n, dims] = groups.at(order[i]);
    if (i > 0) inventory += order.size() > 2 ? ", " : " ";
    if (i + 1 == order.size() && i > 0) inventory += "and ";
    inventory += describe(order[i].first, order[i].second, n, dims);
  }
  return "You need to get to the top of a platform that is " + meters(height) + " high. The highest you can jump is " +
         meters(spec.agent.jump_height) + ". You have " + inventory +
         ". You need exactly three of these objects. How can you get to the top of the platform?";
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::FreeText: return "free_text";
    case PromptVariant::OneSentence: return "one_sentence";
    case PromptVariant::PartialSolution: return "partial_solution";
  }
  return "free_text";
}

PromptVariant parse_variant(std::string_view text) {
  if (text == "free_text") return PromptVariant::FreeText;
  if (text == "one_sentence") return PromptVariant::OneSentence;
  if (text == "partial_solution") return PromptVariant::PartialSolution;
  throw Error(ErrorCode::InvalidArgument, "unknown prompt variant '" + std::string(text) + "'");
}

std::string build_prompt(PromptVariant variant, const ScenarioSpec& spec, bool multimodal) {
  std::string text = multimodal ? std::string(kImageCue) + " " : std::string();
  text += spec.prompt_reconstructed ? reconstructed_prompt(spec) : std::string(kCanonicalPrompt);
  switch (variant) {
    case PromptVariant::FreeText: break;
    case PromptVariant::OneSentence: text += " " + std::string(kOneSentenceInstruction); break;
    case PromptVariant::PartialSolution:
      if (!spec.completed_steps.empty()) text += " " + spec.completed_steps;
      text += " Which objects should the final action be taken with?";
      break;
  }
  return text;
}

std::string build_prompt(PromptVariant variant, const ScenarioRegistry& registry, std::string_view scenario,
                         bool multimodal) {
  return build_prompt(variant, registry.get(scenario), multimodal);
}

}  // namespace stackeval
