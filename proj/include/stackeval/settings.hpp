#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "stackeval/executor.hpp"

namespace stackeval {

struct Settings {
  std::string endpoint;
  std::string model;
  double temperature = 0.6;
  std::optional<std::string> api_key;
  ExecutionMode mode = ExecutionMode::Permissive;
  std::uint64_t seed = 0;
  double tolerance = 0.1;
  std::string voxkb;  // empty: shipped knowledge base
  int workers = 4;
};

// Keys: endpoint, model, temperature, api_key, mode, seed, tolerance, voxkb,
// workers. The environment variable for a key is STACKEVAL_<KEY>.
using SettingsLayer = std::map<std::string, std::string>;
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_environment();

// JSON object of the same keys.
SettingsLayer read_settings_file(const std::filesystem::path& path);

// Command line over environment over file over defaults.
Settings resolve_settings(const SettingsLayer& cli, const EnvLookup& env, const SettingsLayer& file);

}  // namespace stackeval
