#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stackeval/explorer.hpp"
#include "stackeval/llm_client.hpp"
#include "stackeval/metrics.hpp"
#include "stackeval/prompts.hpp"
#include "stackeval/scenario.hpp"

namespace stackeval {

// Responses read from a transcript file; never touches the network.
struct CannedSource {
  std::filesystem::path transcript;
  std::string model_name;  // empty: first record matching scenario and variant
};

// Responses are appended to `transcript` before they are scored.
struct LiveSource {
  LiveEndpoint endpoint;
  std::filesystem::path transcript;
};

struct RunConfig {
  std::string scenario;
  PromptVariant variant = PromptVariant::FreeText;
  ExecutionMode mode = ExecutionMode::Permissive;
  std::uint64_t seed = 0;
  std::variant<CannedSource, LiveSource> source;
  bool multimodal = false;
  bool explore = false;  // strict failures continue into exploration
  double tolerance = kDisplacementTolerance;
};

struct RunContext {
  std::shared_ptr<const VoxKb> kb;
  std::shared_ptr<const ScenarioRegistry> registry;
  std::optional<std::string> api_key;
};

RunContext default_context();

struct ExplorationSummary {
  std::optional<std::size_t> trigger;
  std::string plan;  // rendered
  std::optional<EvalReport> report;
  bool reachable = false;
  std::vector<HabitatGrounding> decisions;
};

struct RunRecord {
  std::string model_name;
  std::string scenario;
  std::string variant;
  std::string mode;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string skip_reason;
  std::string response_text;
  std::optional<EvalReport> report;
  std::optional<ExplorationSummary> exploration;
};

// Errors become a skipped record.
RunRecord run(const RunConfig& config, const RunContext& context);

// Scores one response against a scenario.
RunRecord score_text(const std::string& response, const std::string& scenario, ExecutionMode mode,
                     std::uint64_t seed, const RunContext& context, double tolerance = kDisplacementTolerance,
                     bool explore = false);

std::string to_json(const RunRecord& record);
std::string to_json(const ExplorationSummary& summary);

struct BatchCell {
  double stability = 0.0;  // mean over scored runs
  double iou = 0.0;
  int runs = 0;
  int skipped = 0;
};

struct BatchTable {
  std::vector<std::string> models;    // first-seen order
  std::vector<std::string> variants;  // first-seen order
  std::map<std::pair<std::string, std::string>, BatchCell> cells;
};

struct BatchResult {
  std::vector<RunRecord> records;  // in config order
  BatchTable table;
};

BatchResult batch(const std::vector<RunConfig>& configs, const RunContext& context, int workers = 4);
BatchTable aggregate(const std::vector<RunRecord>& records);
// Aligned text grid: one row per model, (stable, iou) per variant.
std::string render_table(const BatchTable& table);
std::string to_json(const BatchTable& table);

// Scores every record of a transcript in file order.
std::vector<RunRecord> replay(const std::filesystem::path& transcript, const std::string& scenario,
                              ExecutionMode mode, std::uint64_t seed, const RunContext& context,
                              double tolerance = kDisplacementTolerance);

}  // namespace stackeval
