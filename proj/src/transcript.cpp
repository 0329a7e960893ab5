#include "stackeval/transcript.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "stackeval/error.hpp"

namespace stackeval {

namespace {

std::string text_field(const nlohmann::json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw Error(ErrorCode::Parse, std::string("transcript record lacks '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw Error(ErrorCode::Parse, std::string("transcript field '") + key + "' is not a string");
  return it->get<std::string>();
}

}  // namespace

std::string serialize_record(const TranscriptRecord& r) {
  nlohmann::json j = {{"model_name", r.model_name},   {"prompt_variant", r.prompt_variant},
                      {"prompt_text", r.prompt_text}, {"response_text", r.response_text},
                      {"timestamp", r.timestamp},     {"source", r.source}};
  if (!r.scenario.empty()) j["scenario"] = r.scenario;
  return j.dump();
}

TranscriptRecord parse_record(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("transcript line: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "transcript line is not an object");
  TranscriptRecord r;
  r.model_name = text_field(j, "model_name", true);
  r.prompt_variant = text_field(j, "prompt_variant", true);
  r.response_text = text_field(j, "response_text", true);
  r.prompt_text = text_field(j, "prompt_text", false);
  r.scenario = text_field(j, "scenario", false);
  r.timestamp = text_field(j, "timestamp", false);
  r.source = text_field(j, "source", false);
  return r;
}

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<TranscriptRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TranscriptStore::TranscriptStore(std::filesystem::path path) : path_(std::move(path)) {}

void TranscriptStore::append(const TranscriptRecord& record) {
  const std::string line = serialize_record(record) + "\n";
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error(ErrorCode::Io, "cannot open " + path_.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::Io, "write to " + path_.string() + " failed");
    }
    written += static_cast<std::size_t>(n);
  }
  const int synced = ::fsync(fd);
  ::close(fd);
  if (synced != 0) throw Error(ErrorCode::Io, "fsync of " + path_.string() + " failed");
}

std::vector<TranscriptRecord> TranscriptStore::read() const {
  std::lock_guard lock(mutex_);
  if (!std::filesystem::exists(path_)) return {};
  return read_transcript(path_);
}

}  // namespace stackeval
