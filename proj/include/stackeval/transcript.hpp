#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace stackeval {

struct TranscriptRecord {
  std::string model_name;
  std::string prompt_variant;
  std::string scenario;  // empty: any scenario
  std::string prompt_text;
  std::string response_text;
  std::string timestamp;  // ISO 8601 UTC
  std::string source;     // "quoted", "reconstructed" or "live"

  bool operator==(const TranscriptRecord&) const = default;
};

// One JSON object per line, keys sorted.
std::string serialize_record(const TranscriptRecord& record);
TranscriptRecord parse_record(std::string_view line);

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path);

std::string utc_timestamp();

// Append-only store; every append is flushed to disk before returning.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path path);

  void append(const TranscriptRecord& record);
  std::vector<TranscriptRecord> read() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

}  // namespace stackeval
