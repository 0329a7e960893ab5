#include "stackeval/settings.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "stackeval/error.hpp"

namespace stackeval {

namespace {

const char* const kKeys[] = {"endpoint", "model", "temperature", "api_key", "mode",
                             "seed",     "tolerance", "voxkb",   "workers"};

std::string env_name(const std::string& key) {
  std::string name = "STACKEVAL_";
  for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "setting '" + key + "' is not a number: '" + v + "'");
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long n = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return n;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "setting '" + key + "' is not a non-negative integer: '" + v + "'");
}

}  // namespace

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

SettingsLayer read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, path.string() + ": expected an object");
  SettingsLayer layer;
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw Error(ErrorCode::Parse, path.string() + ": unknown setting '" + key + "'");
    }
    layer[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return layer;
}

Settings resolve_settings(const SettingsLayer& cli, const EnvLookup& env, const SettingsLayer& file) {
  auto pick = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = cli.find(key); it != cli.end()) return it->second;
    if (env) {
      if (auto v = env(env_name(key))) return v;
    }
    if (auto it = file.find(key); it != file.end()) return it->second;
    return std::nullopt;
  };
  Settings s;
  if (auto v = pick("endpoint")) s.endpoint = *v;
  if (auto v = pick("model")) s.model = *v;
  if (auto v = pick("temperature")) s.temperature = to_double("temperature", *v);
  if (auto v = pick("api_key"); v && !v->empty()) s.api_key = *v;
  if (auto v = pick("mode")) s.mode = parse_mode(*v);
  if (auto v = pick("seed")) s.seed = to_unsigned("seed", *v);
  if (auto v = pick("tolerance")) s.tolerance = to_double("tolerance", *v);
  if (auto v = pick("voxkb")) s.voxkb = *v;
  if (auto v = pick("workers")) s.workers = static_cast<int>(std::max<std::uint64_t>(1, to_unsigned("workers", *v)));
  return s;
}

}  // namespace stackeval
