// One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "json.hpp"
#include "stackeval/distill.hpp"
#include "stackeval/explorer.hpp"
#include "stackeval/harness.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "stackeval/transcript.hpp"
#include "support.hpp"

// After Eigen: resolv.h defines _res.
#include "httplib.h"

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

constexpr double kCriterion1Seconds = 1.0;
constexpr double kCriterion2Seconds = 1.0;
constexpr double kCriterion3Seconds = 10.0;  // per exploration
constexpr double kCriterion5Seconds = 5.0;
constexpr double kCriterion6Seconds = 30.0;
constexpr double kLossTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-4;
constexpr double kRecoveryTolerance = 1e-6;
constexpr double kNormalEquationsTolerance = 1e-8;
constexpr double kLinearityTolerance = 1e-12;
constexpr int kSeeds = 10;
constexpr int kRandomScenes = 1000;
constexpr int kLossInstances = 100;

const fs::path kSource = STACKEVAL_SOURCE_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int n, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  std::printf("%s %d %s%s%s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

struct Scored {
  GroundedPlan plan;
  ExecutionTrace trace;
  EvalReport report;
};

Scored score(const std::string& text, const std::string& scenario, ExecutionMode mode) {
  const Scene scene = canonical_scene(scenario);
  Scored s;
  s.plan = resolve(parse(text), scene, 0, {.lenient = true});
  s.trace = operationalize(s.plan, scene, mode);
  s.report = report(s.trace, s.plan, canonical_spec(scenario).references);
  return s;
}

std::string first_response(const std::string& file, const std::string& variant, const std::string& scenario) {
  for (const auto& r : read_transcript(kSource / "transcripts" / file)) {
    if (r.prompt_variant == variant && r.scenario == scenario) return r.response_text;
  }
  throw Error(ErrorCode::InvalidArgument, "no record in " + file);
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1
Outcome staircase_golden() {
  Outcome o;
  const auto t0 = Clock::now();
  const Scored s = score(first_response("staircase.jsonl", "free_text", "f6"), "f6", ExecutionMode::Permissive);
  Agent agent = s.trace.final_scene.agent();
  agent.jump_height = 1.0;
  const bool reach = reachable(s.trace.final_scene, agent, 2.0).reachable;
  const double dt = seconds_since(t0);
  o.check(s.report.stability == 1.0, "stability " + fmt("%.6f", s.report.stability));
  o.check(s.report.iou == 1.0, "iou " + fmt("%.6f", s.report.iou));
  o.check(reach, "platform unreachable");
  o.check(dt < kCriterion1Seconds, "took " + fmt("%.3f s", dt));
  return o;
}

// 2
Outcome llama_transcript() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::string text = first_response("llama2_7b.jsonl", "free_text", "f1");
  const Scored p = score(text, "f1", ExecutionMode::Permissive);
  const Scored s = score(text, "f1", ExecutionMode::Strict);
  const double dt = seconds_since(t0);
  std::optional<std::size_t> on_sphere;
  for (std::size_t i = 0; i < s.plan.plan.steps.size() && !on_sphere; ++i) {
    const auto* a = std::get_if<PlaceOn>(&s.plan.plan.steps[i]);
    if (a && s.plan.steps[i].anchors == std::vector<ObjectId>{"sphere_1"}) on_sphere = i;
  }
  o.check(p.report.iou == 0.5, "iou " + fmt("%.6f", p.report.iou));
  o.check(p.report.stability < 1.0, "stability " + fmt("%.6f", p.report.stability));
  o.check(on_sphere.has_value(), "no on-sphere step");
  o.check(detect_failure(s.trace) == on_sphere, "strict failure not at the on-sphere step");
  o.check(dt < kCriterion2Seconds, "took " + fmt("%.3f s", dt));
  return o;
}

// 3
Outcome exploration_loop() {
  Outcome o;
  const Scene scene = canonical_scene("f1");
  const auto& refs = canonical_spec("f1").references;
  std::vector<std::string> failing;
  for (const auto& entry : fs::directory_iterator(kSource / "transcripts")) {
    for (const auto& r : read_transcript(entry.path())) {
      if (r.scenario != "f1") continue;
      const GroundedPlan g = resolve(parse(r.response_text), scene, 0, {.lenient = true});
      if (detect_failure(operationalize(g, scene, ExecutionMode::Strict))) failing.push_back(r.response_text);
    }
  }
  std::sort(failing.begin(), failing.end());
  o.check(!failing.empty(), "no failing shipped plan");
  double worst = 0;
  for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(kSeeds); ++seed) {
    for (const auto& text : failing) {
      const auto t0 = Clock::now();
      const GroundingModel model = train_default_model(kb(), seed);
      const GroundedPlan g = resolve(parse(text), scene, seed, {.lenient = true});
      const Exploration e = explore(scene, g, refs, model, seed);
      const double dt = seconds_since(t0);
      worst = std::max(worst, dt);
      const std::string where = "seed " + std::to_string(seed);
      o.check(e.trigger.has_value(), where + ": no trigger");
      o.check(e.plan.has_value() && e.report.has_value(), where + ": no staircase");
      if (!e.report) continue;
      o.check(e.report->stability == 1.0, where + ": stability " + fmt("%.6f", e.report->stability));
      o.check(e.report->iou == 1.0, where + ": iou " + fmt("%.6f", e.report->iou));
      o.check(e.reach.reachable, where + ": unreachable");
    }
  }
  o.check(worst < kCriterion3Seconds, "slowest exploration " + fmt("%.3f s", worst));
  if (o.pass) o.detail = std::to_string(failing.size()) + " plans x " + std::to_string(kSeeds) + " seeds";
  return o;
}

// 4
Outcome cylinder_generalization() {
  Outcome o;
  const Scene scene = canonical_scene("f1");
  int hits = 0;
  for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(kSeeds); ++seed) {
    const auto data = probe_arena(*kb(), seed);
    std::set<std::string> shapes;
    for (const auto& d : data) shapes.insert(d.shape);
    o.check(shapes.size() == 8 && !shapes.count("cylinder"), "training shapes include the cylinder");
    const GroundingModel model = train_similarity(data, seed, *kb());
    for (const auto& r : model.references) o.check(r.shape != "cylinder", "cylinder reference");
    const auto up = ground_object(scene, "cylinder_2", rotation_aligning(Axis::PosY), model, seed);
    const auto side = ground_object(scene, "cylinder_2", rotation_aligning(Axis::PosX), model, seed);
    hits += up.label == GroundLabel::Flat && side.label == GroundLabel::Round ? 1 : 0;
  }
  o.check(hits == kSeeds, std::to_string(hits) + "/" + std::to_string(kSeeds) + " seeds");
  return o;
}

// 5
double oracle_iou(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<bool> used(b.size(), false);
  int matched = 0;
  for (const auto& x : a) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && b[j] == x) {
        used[j] = true;
        ++matched;
        break;
      }
    }
  }
  const int uni = static_cast<int>(a.size() + b.size()) - matched;
  return uni == 0 ? 0.0 : static_cast<double>(matched) / uni;
}

Outcome metric_oracles() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<std::string> alphabet = {"cube", "cylinder", "sphere"};
  std::vector<std::vector<std::string>> all = {{}};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].size() == 6) continue;
    const std::size_t start = all[i].empty()
                                  ? 0
                                  : static_cast<std::size_t>(std::find(alphabet.begin(), alphabet.end(),
                                                                       all[i].back()) - alphabet.begin());
    for (std::size_t k = start; k < alphabet.size(); ++k) {
      auto m = all[i];
      m.push_back(alphabet[k]);
      all.push_back(m);
    }
  }
  o.check(all.size() == 84, "enumerated " + std::to_string(all.size()) + " multisets");
  std::size_t pairs = 0;
  const auto& refs = canonical_spec("f1").references;
  for (const auto& a : all) {
    for (const auto& b : all) {
      ++pairs;
      o.check(iou(a, {b}).value == oracle_iou(a, b), "iou mismatch");
    }
    o.check(iou(a, refs).value == std::max(oracle_iou(a, refs[0]), oracle_iou(a, refs[1])), "max over references");
  }
  const double dt = seconds_since(t0);
  o.check(dt < kCriterion5Seconds, "iou sweep took " + fmt("%.3f s", dt));

  Rng rng(5);
  for (int k = 0; k < kRandomScenes; ++k) {
    const Scene before = random_scene(rng, 8);
    const Scene after = settle(before).scene;
    const auto ids = ids_of(before);
    bool aligned = true;
    for (const auto& obj : after.objects()) aligned = aligned && up_local_axis(obj.rotation) >= 0;
    o.check(aligned, "settled pose not axis-aligned");
    if (!aligned) continue;
    const double expected = static_cast<double>(oracle_stable_count(before, after, ids, kDisplacementTolerance)) /
                            static_cast<double>(ids.size());
    o.check(stability(before, after, ids) == expected, "stability mismatch on scene " + std::to_string(k));
  }
  if (o.pass) o.detail = std::to_string(pairs) + " iou pairs, " + std::to_string(kRandomScenes) + " settles";
  return o;
}

// 6
Outcome settle_properties() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(6);
  for (int k = 0; k < kRandomScenes; ++k) {
    const Scene s = random_scene(rng, 8);
    const SettleResult a = settle(s);
    const SettleResult b = settle(s);
    const std::string where = "scene " + std::to_string(k);
    o.check(a.scene.identical_to(b.scene), where + ": not deterministic");
    o.check(settle(a.scene).scene.identical_to(a.scene), where + ": not idempotent");
    o.check(ids_of(a.scene) == ids_of(s), where + ": objects not conserved");

    const SceneObject& first = s.objects().front();
    SceneObject lone = first;
    lone.position.y() = 0.0;
    const Scene alone = make_scene({lone});
    o.check(settle(alone).scene.identical_to(alone), where + ": lone object moved");
  }
  const double dt = seconds_since(t0);
  o.check(dt < kCriterion6Seconds, "took " + fmt("%.3f s", dt));
  if (o.pass) o.detail = fmt("%.2f s", dt);
  return o;
}

// 7
Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  }
  return m;
}

AttentionStack random_stack(Rng& rng, std::size_t heads, Eigen::Index rows, Eigen::Index cols) {
  AttentionStack s;
  for (std::size_t h = 0; h < heads; ++h) {
    Eigen::MatrixXd m = random_matrix(rng, rows, cols).cwiseAbs();
    for (Eigen::Index i = 0; i < rows; ++i) m.row(i) /= m.row(i).sum();
    s.heads.push_back(m);
  }
  return s;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

Outcome loss_numerics() {
  Outcome o;
  Rng rng(7);
  double worst_loss = 0, worst_grad = 0;
  for (int k = 0; k < kLossInstances; ++k) {
    const std::size_t heads = 1 + rng.index(3);
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(4));
    const auto cols = static_cast<Eigen::Index>(2 + rng.index(5));
    AttentionStack lang = random_stack(rng, heads, rows, cols);
    const AttentionStack obj = random_stack(rng, heads, rows, cols);
    double brute = 0;
    for (std::size_t h = 0; h < heads; ++h) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) brute += std::pow(lang.heads[h](i, c) - obj.heads[h](i, c), 2);
      }
    }
    worst_loss = std::max(worst_loss, std::abs(attention_loss(lang, obj) - brute));

    const auto grad = attention_loss_gradient(lang, obj, identity_alignment(lang));
    const double step = 1e-6;
    for (std::size_t h = 0; h < heads; ++h) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          AttentionStack plus = lang, minus = lang;
          plus.heads[h](i, c) += step;
          minus.heads[h](i, c) -= step;
          const double fd = (attention_loss(plus, obj) - attention_loss(minus, obj)) / (2 * step);
          worst_grad = std::max(worst_grad, relative_error(grad[h](i, c), fd));
        }
      }
    }

    const auto v = static_cast<Eigen::Index>(1 + rng.index(5));
    const auto l = static_cast<Eigen::Index>(1 + rng.index(5));
    const Eigen::VectorXd ol = random_matrix(rng, l, 1).col(0);
    const Eigen::VectorXd ov = random_matrix(rng, v, 1).col(0);
    const Eigen::MatrixXd w = random_matrix(rng, v, l);
    double e = 0;
    for (Eigen::Index j = 0; j < l; ++j) {
      double proj = 0;
      for (Eigen::Index i = 0; i < v; ++i) proj += ov[i] * w(i, j);
      e += (ol[j] - proj) * (ol[j] - proj);
    }
    worst_loss = std::max(worst_loss, std::abs(embedding_loss(ol, ov, w) - e));
    const EmbeddingGradient g = embedding_loss_gradient(ol, ov, w);
    for (Eigen::Index i = 0; i < v; ++i) {
      for (Eigen::Index j = 0; j < l; ++j) {
        Eigen::MatrixXd p = w, m = w;
        p(i, j) += step;
        m(i, j) -= step;
        worst_grad = std::max(
            worst_grad, relative_error(g.w(i, j), (embedding_loss(ol, ov, p) - embedding_loss(ol, ov, m)) / (2 * step)));
      }
      Eigen::VectorXd p = ov, m = ov;
      p[i] += step;
      m[i] -= step;
      worst_grad = std::max(
          worst_grad, relative_error(g.obj_v[i], (embedding_loss(ol, p, w) - embedding_loss(ol, m, w)) / (2 * step)));
    }
    for (Eigen::Index j = 0; j < l; ++j) {
      Eigen::VectorXd p = ol, m = ol;
      p[j] += step;
      m[j] -= step;
      worst_grad = std::max(
          worst_grad, relative_error(g.obj_l[j], (embedding_loss(p, ov, w) - embedding_loss(m, ov, w)) / (2 * step)));
    }
  }
  o.check(worst_loss <= kLossTolerance, "loss error " + fmt("%.3g", worst_loss));
  o.check(worst_grad <= kGradientTolerance, "gradient error " + fmt("%.3g", worst_grad));

  double worst_fit = 0, worst_residual = 0;
  for (int k = 0; k < 20; ++k) {
    const auto v = static_cast<Eigen::Index>(2 + rng.index(4));
    const auto l = static_cast<Eigen::Index>(1 + rng.index(5));
    const Eigen::MatrixXd planted = random_matrix(rng, v, l);
    std::vector<ProjectionPair> clean, noisy;
    for (int n = 0; n < 3 * v; ++n) {
      ProjectionPair p;
      p.obj_v = random_matrix(rng, v, 1).col(0);
      p.obj_l = planted.transpose() * p.obj_v;
      clean.push_back(p);
      p.obj_l += 0.5 * random_matrix(rng, l, 1).col(0);
      noisy.push_back(p);
    }
    worst_fit = std::max(worst_fit, (fit_projection(clean).w - planted).norm());
    worst_residual = std::max(worst_residual, normal_equations_residual(noisy, fit_projection(noisy).w));
  }
  o.check(worst_fit <= kRecoveryTolerance, "recovery error " + fmt("%.3g", worst_fit));
  o.check(worst_residual <= kNormalEquationsTolerance, "normal equations residual " + fmt("%.3g", worst_residual));

  for (int k = 0; k < kLossInstances; ++k) {
    const double c = rng.uniform(0, 5), a = rng.uniform(0, 5), e = rng.uniform(0, 5);
    const LambdaWeights base = {rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
    const double terms[3] = {c, a, e};
    for (std::size_t i = 0; i < 3; ++i) {
      const double s = rng.uniform(0, 10);
      LambdaWeights scaled = base;
      scaled[i] *= s;
      const double delta = combined_loss(scaled, c, a, e) - combined_loss(base, c, a, e);
      o.check(std::abs(delta - (s - 1) * base[i] * terms[i]) <= kLinearityTolerance, "combined loss not linear");
    }
  }
  if (o.pass) o.detail = "loss " + fmt("%.2g", worst_loss) + ", grad " + fmt("%.2g", worst_grad);
  return o;
}

// 8
Outcome preference_labels() {
  Outcome o;
  const Scene scene = canonical_scene("f1");
  const auto& refs = canonical_spec("f1").references;
  std::ifstream in(kSource / "corpus/preferences.jsonl");
  o.check(static_cast<bool>(in), "corpus missing");
  std::string line;
  int agree = 0, total = 0;
  bool same_place_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string text = j["response_text"];
    const std::string id = j["id"];
    const ScoredResponse r = score_response(text, scene, refs);
    const Scored s = score(text, "f1", ExecutionMode::Permissive);
    const bool blocked = s.report.failure_reason && (*s.report.failure_reason == FailureReason::UnknownObject ||
                                                     *s.report.failure_reason == FailureReason::CollisionAtTarget);
    const bool from_report = s.report.stability == 1.0 && !blocked;
    ++total;
    const bool ok = r.good == from_report && r.good == (j["expected"] == "good");
    agree += ok ? 1 : 0;
    o.check(ok, id + " disagrees");
    if (id == "same_place") {
      same_place_seen = true;
      o.check(!r.good && s.report.failure_reason == FailureReason::CollisionAtTarget, "same-place case not caught");
    }
  }
  o.check(same_place_seen, "same-place case missing");
  if (o.pass) o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree";
  return o;
}

// 9
Outcome offline_guarantee() {
  Outcome o;
  set_network_enabled(false);
  const std::size_t before = network_attempts();
  const RunContext ctx = default_context();
  int scored = 0;
  for (const auto& entry : fs::directory_iterator(kSource / "transcripts")) {
    for (const auto& r : read_transcript(entry.path())) {
      RunConfig c;
      c.scenario = r.scenario;
      c.variant = parse_variant(r.prompt_variant);
      c.source = CannedSource{entry.path(), r.model_name};
      scored += run(c, ctx).skipped ? 0 : 1;
    }
  }
  o.check(network_attempts() == before, "canned runs touched the network");
  o.check(scored > 0, "nothing scored");
  try {
    query_llm({"http://127.0.0.1:9/v1", "m", 0.0, 1}, "x", "k");
    o.check(false, "disabled network still queried");
  } catch (const Error& e) {
    o.check(e.code() == ErrorCode::NetworkError, "disabled network gave " + std::string(e.what()));
  }
  o.check(network_attempts() == before, "disabled query opened a socket");

  // Live path against a loopback stub.
  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Place the cube on the ground."}}]})",
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  set_network_enabled(true);
  try {
    const std::string reply =
        query_llm({"http://127.0.0.1:" + std::to_string(port) + "/v1", "stub", 0.0, 5}, "hello", "k");
    o.check(reply == "Place the cube on the ground.", "stub reply mangled");
  } catch (const Error& e) {
    o.check(false, std::string("stub query failed: ") + e.what());
  }
  set_network_enabled(false);
  server.stop();
  th.join();
  if (o.pass) o.detail = std::to_string(scored) + " canned runs offline";
  return o;
}

}  // namespace

int main() {
  set_network_enabled(false);
  criterion(1, "staircase golden plan", staircase_golden);
  criterion(2, "LLaMA 2-7B canned transcript", llama_transcript);
  criterion(3, "exploration repairs failing plans", exploration_loop);
  criterion(4, "cylinder generalization", cylinder_generalization);
  criterion(5, "metric oracles", metric_oracles);
  criterion(6, "settle properties", settle_properties);
  criterion(7, "loss numerics", loss_numerics);
  criterion(8, "preference labeling", preference_labels);
  criterion(9, "offline guarantee", offline_guarantee);
  return failures == 0 ? 0 : 1;
}
