#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stackeval/distill.hpp"
#include "stackeval/error.hpp"
#include "stackeval/harness.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "stackeval/settings.hpp"
#include "stackeval/transcript.hpp"

using namespace stackeval;

namespace {

struct Common {
  std::string config;
  std::string mode;
  std::string seed;
  std::string tolerance;
  std::string voxkb;
  std::string workers;
  std::string endpoint;
  std::string model;
  std::string temperature;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "settings file (JSON)");
  app->add_option("--mode", c.mode, "strict | permissive");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--tolerance", c.tolerance, "displacement tolerance, m");
  app->add_option("--voxkb", c.voxkb, "knowledge base file");
}

void add_live(CLI::App* app, Common& c) {
  app->add_option("--endpoint", c.endpoint, "chat-completions base URL");
  app->add_option("--model", c.model, "model name");
  app->add_option("--temperature", c.temperature, "sampling temperature");
}

Settings settings_from(const Common& c) {
  SettingsLayer cli;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) cli[key] = v;
  };
  put("mode", c.mode);
  put("seed", c.seed);
  put("tolerance", c.tolerance);
  put("voxkb", c.voxkb);
  put("workers", c.workers);
  put("endpoint", c.endpoint);
  put("model", c.model);
  put("temperature", c.temperature);
  const SettingsLayer file = c.config.empty() ? SettingsLayer{} : read_settings_file(c.config);
  return resolve_settings(cli, process_environment(), file);
}

RunContext context_from(const Settings& s) {
  RunContext ctx = default_context();
  if (!s.voxkb.empty()) ctx.kb = std::make_shared<const VoxKb>(VoxKb::load(s.voxkb));
  ctx.api_key = s.api_key;
  return ctx;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

LambdaWeights parse_lambda(const std::string& text) {
  LambdaWeights l{};
  std::stringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) break;
    l[i++] = std::stod(part);
  }
  if (i != 3 || std::getline(in, part, ',')) {
    throw Error(ErrorCode::InvalidArgument, "--lambda takes three comma-separated weights");
  }
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical-reasoning evaluation of language-model stacking plans"};
  app.require_subcommand(1);

  Common common;
  std::string scenario = "f1";
  std::string variant = "free_text";
  std::string transcript;
  std::string plan_file;
  std::string expect;
  std::string out_path;
  std::string model_out;
  std::string input;
  std::string lambda = "1,1,1";
  double margin = kDefaultMargin;
  bool explore = false;
  bool multimodal = false;
  std::vector<std::string> transcripts;
  std::vector<std::string> variants;
  std::vector<std::string> scenarios;

  auto* run_cmd = app.add_subcommand("run", "prompt a model (live or canned) and score the response");
  add_common(run_cmd, common);
  add_live(run_cmd, common);
  run_cmd->add_option("--scenario", scenario, "scenario name");
  run_cmd->add_option("--variant", variant, "free_text | one_sentence | partial_solution");
  run_cmd->add_option("--transcript", transcript, "canned responses, or where live responses are appended");
  run_cmd->add_flag("--explore", explore, "explore after a strict failure");
  run_cmd->add_flag("--multimodal", multimodal, "prefix the image cue");

  auto* score_cmd = app.add_subcommand("score", "score every response in a transcript");
  add_common(score_cmd, common);
  score_cmd->add_option("--scenario", scenario, "scenario for records without one");
  score_cmd->add_option("--transcript", transcript, "transcript file")->required();
  score_cmd->add_flag("--explore", explore, "explore after a strict failure");

  auto* batch_cmd = app.add_subcommand("batch", "score transcripts x variants x scenarios and tabulate");
  add_common(batch_cmd, common);
  batch_cmd->add_option("--workers", common.workers, "concurrent runs");
  batch_cmd->add_option("--transcript", transcripts, "canned transcript files")->required();
  batch_cmd->add_option("--variant", variants, "prompt variants");
  batch_cmd->add_option("--scenario", scenarios, "scenarios");
  batch_cmd->add_option("--out", out_path, "write run records (JSON lines)");

  auto* explore_cmd = app.add_subcommand("explore", "run a plan strictly and explore on failure");
  add_common(explore_cmd, common);
  explore_cmd->add_option("--scenario", scenario, "scenario name");
  explore_cmd->add_option("--plan", plan_file, "plan text file")->required();
  explore_cmd->add_option("--model-out", model_out, "save the trained grounding model");

  auto* losses_cmd = app.add_subcommand("losses", "evaluate the distillation losses on a tensor file");
  losses_cmd->add_option("--input", input, "tensor file")->required();
  losses_cmd->add_option("--lambda", lambda, "weights: contrastive,attention,embedding");
  losses_cmd->add_option("--margin", margin, "contrastive margin");

  auto* prompt_cmd = app.add_subcommand("prompt", "print the prompt for a scenario and variant");
  prompt_cmd->add_option("--scenario", scenario, "scenario name");
  prompt_cmd->add_option("--variant", variant, "free_text | one_sentence | partial_solution");
  prompt_cmd->add_flag("--multimodal", multimodal, "prefix the image cue");

  auto* replay_cmd = app.add_subcommand("replay", "re-score a transcript; compare against earlier output");
  add_common(replay_cmd, common);
  replay_cmd->add_option("--scenario", scenario, "scenario for records without one");
  replay_cmd->add_option("--transcript", transcript, "transcript file")->required();
  replay_cmd->add_option("--expect", expect, "earlier replay output to compare byte for byte");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*losses_cmd) {
      const LossTerms t = losses_from_tensors(load_tensors(input), margin);
      const LambdaWeights l = parse_lambda(lambda);
      std::printf("contrastive %.17g\nattention %.17g\nembedding %.17g\ncombined %.17g\n", t.contrastive,
                  t.attention, t.embedding, combined_loss(l, t.contrastive, t.attention, t.embedding));
      return 0;
    }

    if (*prompt_cmd) {
      std::cout << build_prompt(parse_variant(variant), ScenarioRegistry(), scenario, multimodal) << '\n';
      return 0;
    }

    const Settings settings = settings_from(common);
    const RunContext ctx = context_from(settings);

    if (*run_cmd) {
      RunConfig cfg;
      cfg.scenario = scenario;
      cfg.variant = parse_variant(variant);
      cfg.mode = settings.mode;
      cfg.seed = settings.seed;
      cfg.tolerance = settings.tolerance;
      cfg.explore = explore;
      cfg.multimodal = multimodal;
      if (!settings.endpoint.empty()) {
        if (transcript.empty()) transcript = "transcripts/live.jsonl";
        cfg.source = LiveSource{{settings.endpoint, settings.model, settings.temperature}, transcript};
      } else {
        if (transcript.empty()) throw Error(ErrorCode::InvalidArgument, "give --transcript or --endpoint");
        cfg.source = CannedSource{transcript, settings.model};
        set_network_enabled(false);
      }
      const RunRecord r = run(cfg, ctx);
      std::cout << to_json(r) << '\n';
      return r.skipped ? 2 : 0;
    }

    if (*score_cmd) {
      set_network_enabled(false);
      for (const auto& record : read_transcript(transcript)) {
        const std::string& where = record.scenario.empty() ? scenario : record.scenario;
        RunRecord r = score_text(record.response_text, where, settings.mode, settings.seed, ctx, settings.tolerance,
                                 explore);
        r.model_name = record.model_name;
        r.variant = record.prompt_variant;
        std::cout << to_json(r) << '\n';
      }
      return 0;
    }

    if (*batch_cmd) {
      set_network_enabled(false);
      if (variants.empty()) variants = {"free_text", "one_sentence"};
      if (scenarios.empty()) scenarios = {"f1"};
      std::vector<RunConfig> configs;
      for (const auto& t : transcripts) {
        for (const auto& s : scenarios) {
          for (const auto& v : variants) {
            RunConfig cfg;
            cfg.scenario = s;
            cfg.variant = parse_variant(v);
            cfg.mode = settings.mode;
            cfg.seed = settings.seed;
            cfg.tolerance = settings.tolerance;
            cfg.source = CannedSource{t, ""};
            configs.push_back(cfg);
          }
        }
      }
      const BatchResult result = batch(configs, ctx, settings.workers);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + out_path);
        for (const auto& r : result.records) out << to_json(r) << '\n';
        out << to_json(result.table) << '\n';
      }
      std::cout << render_table(result.table);
      return 0;
    }

    if (*explore_cmd) {
      set_network_enabled(false);
      const ScenarioSpec& spec = ctx.registry->get(scenario);
      const Scene scene = spawn(spec, ctx.kb);
      ResolveOptions options;
      options.lenient = true;
      const GroundedPlan grounded = resolve(parse(slurp(plan_file)), scene, settings.seed, options);
      const GroundingModel model = train_default_model(ctx.kb, settings.seed);
      if (!model_out.empty()) save_model(model, model_out);
      const Exploration e = stackeval::explore(scene, grounded, spec.references, model, settings.seed);
      ExplorationSummary s;
      s.trigger = e.trigger;
      if (e.plan) s.plan = render(*e.plan);
      s.report = e.report;
      s.reachable = e.reach.reachable;
      s.decisions = e.decisions;
      if (e.trigger) {
        std::cout << "failed at step " << *e.trigger + 1 << "\n";
      } else {
        std::cout << "plan executed without failure\n";
      }
      for (const auto& d : e.decisions) {
        std::cout << d.object << " " << d.orientation << " up: " << to_string(d.label) << " (";
        for (std::size_t i = 0; i < d.neighbors.size(); ++i) std::cout << (i ? " " : "") << d.neighbors[i];
        std::cout << ")\n";
      }
      if (e.plan) std::cout << render(*e.plan);
      std::cout << to_json(s) << '\n';
      return 0;
    }

    if (*replay_cmd) {
      set_network_enabled(false);
      std::string text;
      for (const auto& r : replay(transcript, scenario, settings.mode, settings.seed, ctx, settings.tolerance)) {
        text += to_json(r) + "\n";
      }
      std::cout << text;
      if (!expect.empty() && slurp(expect) != text) {
        std::cerr << "replay differs from " << expect << '\n';
        return 3;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
