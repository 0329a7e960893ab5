#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stackeval/plan.hpp"

namespace stackeval {

// Total on any input: text that describes no manipulation becomes Ignore.
Plan parse(std::string_view text);

// Lines and list items, then sentences; list markers are dropped.
std::vector<std::string> split_sentences(std::string_view text);
// Splits at ",", "then" and "and" when the next word is a command verb.
std::vector<std::string> split_clauses(std::string_view sentence);

// Base form of a manipulation verb ("stacked" -> "stack"), or "".
std::string verb_base(std::string_view word);

}  // namespace stackeval
