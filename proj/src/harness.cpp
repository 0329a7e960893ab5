#include "stackeval/harness.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stackeval/error.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "stackeval/transcript.hpp"

namespace stackeval {

namespace {

RunRecord skipped(RunRecord r, const std::string& reason) {
  r.skipped = true;
  r.skip_reason = reason;
  r.report.reset();
  r.exploration.reset();
  return r;
}

std::optional<TranscriptRecord> pick(const std::vector<TranscriptRecord>& records, const RunConfig& config,
                                     const std::string& model) {
  for (const auto& r : records) {
    if (r.prompt_variant != to_string(config.variant)) continue;
    if (!r.scenario.empty() && r.scenario != config.scenario) continue;
    if (!model.empty() && r.model_name != model) continue;
    return r;
  }
  return std::nullopt;
}

nlohmann::json report_json(const EvalReport& r) { return nlohmann::json::parse(to_json(r)); }

nlohmann::json summary_json(const ExplorationSummary& s) {
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : s.decisions) {
    decisions.push_back({{"object", d.object},
                         {"shape", d.shape},
                         {"orientation", d.orientation},
                         {"label", std::string(to_string(d.label))},
                         {"neighbors", d.neighbors}});
  }
  nlohmann::json j = {{"plan", s.plan}, {"reachable", s.reachable}, {"decisions", decisions}};
  j["trigger"] = s.trigger ? nlohmann::json(*s.trigger) : nlohmann::json(nullptr);
  j["report"] = s.report ? report_json(*s.report) : nlohmann::json(nullptr);
  return j;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

RunContext default_context() {
  return {VoxKb::shared_default(), std::make_shared<const ScenarioRegistry>(), std::nullopt};
}

RunRecord score_text(const std::string& response, const std::string& scenario, ExecutionMode mode,
                     std::uint64_t seed, const RunContext& context, double tolerance, bool explore) {
  RunRecord r;
  r.scenario = scenario;
  r.mode = std::string(to_string(mode));
  r.seed = seed;
  r.response_text = response;
  if (response.find_first_not_of(" \t\r\n") == std::string::npos) return skipped(r, "empty response");
  try {
    const ScenarioSpec& spec = context.registry->get(scenario);
    const Scene scene = spawn(spec, context.kb);
    ResolveOptions options;
    options.lenient = true;
    const GroundedPlan grounded = resolve(parse(response), scene, seed, options);
    const ExecutionTrace trace = operationalize(grounded, scene, mode);
    r.report = report(trace, grounded, spec.references, tolerance);
    if (explore && mode == ExecutionMode::Strict && trace.failure_step()) {
      const GroundingModel model = train_default_model(context.kb, seed);
      Exploration e = stackeval::explore(scene, grounded, spec.references, model, seed);
      ExplorationSummary s;
      s.trigger = e.trigger;
      if (e.plan) s.plan = render(*e.plan);
      s.report = e.report;
      s.reachable = e.reach.reachable;
      s.decisions = std::move(e.decisions);
      r.exploration = std::move(s);
    }
  } catch (const Error& e) {
    return skipped(r, e.what());
  }
  return r;
}

RunRecord run(const RunConfig& config, const RunContext& context) {
  RunRecord base;
  base.scenario = config.scenario;
  base.variant = std::string(to_string(config.variant));
  base.mode = std::string(to_string(config.mode));
  base.seed = config.seed;

  std::string response;
  try {
    if (const auto* canned = std::get_if<CannedSource>(&config.source)) {
      base.model_name = canned->model_name;
      const auto records = read_transcript(canned->transcript);
      const auto record = pick(records, config, canned->model_name);
      if (!record) return skipped(base, "no matching transcript record");
      base.model_name = record->model_name;
      response = record->response_text;
    } else {
      const auto& live = std::get<LiveSource>(config.source);
      base.model_name = live.endpoint.model;
      const std::string prompt = build_prompt(config.variant, *context.registry, config.scenario, config.multimodal);
      response = query_llm(live.endpoint, prompt, context.api_key);
      TranscriptRecord record;
      record.model_name = live.endpoint.model;
      record.prompt_variant = base.variant;
      record.scenario = config.scenario;
      record.prompt_text = prompt;
      record.response_text = response;
      record.timestamp = utc_timestamp();
      record.source = "live";
      TranscriptStore(live.transcript).append(record);
    }
  } catch (const Error& e) {
    return skipped(base, e.what());
  }

  RunRecord scored = score_text(response, config.scenario, config.mode, config.seed, context, config.tolerance,
                                config.explore);
  scored.model_name = base.model_name;
  scored.variant = base.variant;
  return scored;
}

std::string to_json(const ExplorationSummary& summary) { return summary_json(summary).dump(); }

std::string to_json(const RunRecord& r) {
  nlohmann::json j = {{"model_name", r.model_name}, {"scenario", r.scenario},
                      {"variant", r.variant},       {"mode", r.mode},
                      {"seed", r.seed},             {"skipped", r.skipped},
                      {"response_text", r.response_text}};
  j["skip_reason"] = r.skipped ? nlohmann::json(r.skip_reason) : nlohmann::json(nullptr);
  j["report"] = r.report ? report_json(*r.report) : nlohmann::json(nullptr);
  j["exploration"] = r.exploration ? summary_json(*r.exploration) : nlohmann::json(nullptr);
  return j.dump();
}

BatchTable aggregate(const std::vector<RunRecord>& records) {
  BatchTable t;
  for (const auto& r : records) {
    if (std::find(t.models.begin(), t.models.end(), r.model_name) == t.models.end()) t.models.push_back(r.model_name);
    if (std::find(t.variants.begin(), t.variants.end(), r.variant) == t.variants.end()) {
      t.variants.push_back(r.variant);
    }
    BatchCell& c = t.cells[{r.model_name, r.variant}];
    if (r.skipped || !r.report) {
      ++c.skipped;
      continue;
    }
    c.stability += r.report->stability;
    c.iou += r.report->iou;
    ++c.runs;
  }
  for (auto& [key, c] : t.cells) {
    if (c.runs > 0) {
      c.stability /= c.runs;
      c.iou /= c.runs;
    }
  }
  return t;
}

BatchResult batch(const std::vector<RunConfig>& configs, const RunContext& context, int workers) {
  BatchResult result;
  result.records.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) result.records[i] = run(configs[i], context);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  result.table = aggregate(result.records);
  return result;
}

std::string render_table(const BatchTable& t) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"model"};
  for (const auto& v : t.variants) {
    header.push_back(v + " stable");
    header.push_back(v + " iou");
  }
  header.push_back("skipped");
  rows.push_back(header);
  for (const auto& m : t.models) {
    std::vector<std::string> row = {m};
    int skips = 0;
    for (const auto& v : t.variants) {
      auto it = t.cells.find({m, v});
      if (it == t.cells.end() || it->second.runs == 0) {
        row.push_back("-");
        row.push_back("-");
      } else {
        row.push_back(fixed2(it->second.stability));
        row.push_back(fixed2(it->second.iou));
      }
      if (it != t.cells.end()) skips += it->second.skipped;
    }
    row.push_back(std::to_string(skips));
    rows.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << "  ";
      if (i == 0) {
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        out << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const BatchTable& t) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& m : t.models) {
    for (const auto& v : t.variants) {
      auto it = t.cells.find({m, v});
      if (it == t.cells.end()) continue;
      const BatchCell& c = it->second;
      nlohmann::json cell = {{"model", m}, {"variant", v}, {"runs", c.runs}, {"skipped", c.skipped}};
      cell["stability"] = c.runs ? nlohmann::json(c.stability) : nlohmann::json(nullptr);
      cell["iou"] = c.runs ? nlohmann::json(c.iou) : nlohmann::json(nullptr);
      cells.push_back(cell);
    }
  }
  return nlohmann::json({{"aggregation", "mean"}, {"cells", cells}}).dump();
}

std::vector<RunRecord> replay(const std::filesystem::path& transcript, const std::string& scenario,
                              ExecutionMode mode, std::uint64_t seed, const RunContext& context, double tolerance) {
  std::vector<RunRecord> out;
  for (const auto& record : read_transcript(transcript)) {
    const std::string& where = record.scenario.empty() ? scenario : record.scenario;
    RunRecord r = score_text(record.response_text, where, mode, seed, context, tolerance);
    r.model_name = record.model_name;
    r.variant = record.prompt_variant;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stackeval
