#pragma once

#include <string>
#include <string_view>

#include "stackeval/scenario.hpp"

namespace stackeval {

enum class PromptVariant { FreeText, OneSentence, PartialSolution };

std::string_view to_string(PromptVariant variant);
PromptVariant parse_variant(std::string_view text);

// The open-world prompt, quoted.
extern const std::string_view kCanonicalPrompt;
inline constexpr std::string_view kOneSentenceInstruction = "Provide your response in one sentence.";
inline constexpr std::string_view kImageCue = "You are in the room shown in the image.";

// `multimodal` prefixes the image cue used with vision-language models.
std::string build_prompt(PromptVariant variant, const ScenarioSpec& spec, bool multimodal = false);
// Throws UnknownScenario.
std::string build_prompt(PromptVariant variant, const ScenarioRegistry& registry, std::string_view scenario,
                         bool multimodal = false);

}  // namespace stackeval
