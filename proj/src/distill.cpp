#include "stackeval/distill.hpp"

#include <algorithm>
#include <cmath>

#include "stackeval/error.hpp"
#include "stackeval/parser.hpp"
#include "stackeval/resolver.hpp"
#include "stackeval/rng.hpp"

namespace stackeval {

namespace {

void check_stacks(const AttentionStack& language, const AttentionStack& object, const Alignment& alignment) {
  if (language.heads.size() != object.heads.size()) {
    throw Error(ErrorCode::ShapeMismatch, "attention stacks differ in head count");
  }
  for (std::size_t h = 0; h < language.heads.size(); ++h) {
    const auto& l = language.heads[h];
    const auto& o = object.heads[h];
    if (l.cols() != o.cols()) throw Error(ErrorCode::ShapeMismatch, "attention heads differ in width");
    if (h > 0 && (l.rows() != language.heads[0].rows() || o.rows() != object.heads[0].rows())) {
      throw Error(ErrorCode::ShapeMismatch, "heads within a stack differ in shape");
    }
    for (const auto& [i, j] : alignment) {
      if (static_cast<Eigen::Index>(i) >= l.rows() || static_cast<Eigen::Index>(j) >= o.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "alignment row out of range");
      }
    }
  }
}

void check_projection(const Eigen::VectorXd& obj_l, const Eigen::VectorXd& obj_v, const Eigen::MatrixXd& w) {
  if (w.rows() != obj_v.size() || w.cols() != obj_l.size()) {
    throw Error(ErrorCode::ShapeMismatch, "projection is " + std::to_string(w.rows()) + "x" +
                                              std::to_string(w.cols()) + ", embeddings are " +
                                              std::to_string(obj_v.size()) + " and " + std::to_string(obj_l.size()));
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> stacked(const std::vector<ProjectionPair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no projection pairs");
  const Eigen::Index v = pairs.front().obj_v.size();
  const Eigen::Index l = pairs.front().obj_l.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(pairs.size()), v);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(pairs.size()), l);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].obj_v.size() != v || pairs[i].obj_l.size() != l) {
      throw Error(ErrorCode::ShapeMismatch, "projection pairs differ in dimension");
    }
    x.row(static_cast<Eigen::Index>(i)) = pairs[i].obj_v.transpose();
    y.row(static_cast<Eigen::Index>(i)) = pairs[i].obj_l.transpose();
  }
  return {x, y};
}

bool logical_violation(const ExecutionTrace& trace) {
  for (const auto& s : trace.steps) {
    if (s.status == StepStatus::Failed &&
        (s.reason == FailureReason::UnknownObject || s.reason == FailureReason::CollisionAtTarget)) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool AttentionStack::row_stochastic(double tolerance) const {
  for (const auto& h : heads) {
    if ((h.array() < 0.0).any()) return false;
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      if (std::abs(h.row(r).sum() - 1.0) > tolerance) return false;
    }
  }
  return true;
}

Alignment identity_alignment(const AttentionStack& stack) {
  Alignment a;
  if (stack.heads.empty()) return a;
  for (Eigen::Index r = 0; r < stack.heads.front().rows(); ++r) {
    a.emplace_back(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
  }
  return a;
}

double attention_loss(const AttentionStack& language, const AttentionStack& object, const Alignment& alignment) {
  check_stacks(language, object, alignment);
  double loss = 0.0;
  for (std::size_t h = 0; h < language.heads.size(); ++h) {
    for (const auto& [i, j] : alignment) {
      loss += (language.heads[h].row(static_cast<Eigen::Index>(i)) - object.heads[h].row(static_cast<Eigen::Index>(j)))
                  .squaredNorm();
    }
  }
  return loss;
}

double attention_loss(const AttentionStack& language, const AttentionStack& object) {
  if (!language.heads.empty() && !object.heads.empty() &&
      language.heads.front().rows() != object.heads.front().rows()) {
    throw Error(ErrorCode::ShapeMismatch, "attention stacks differ in row count");
  }
  return attention_loss(language, object, identity_alignment(language));
}

std::vector<Eigen::MatrixXd> attention_loss_gradient(const AttentionStack& language, const AttentionStack& object,
                                                     const Alignment& alignment) {
  check_stacks(language, object, alignment);
  std::vector<Eigen::MatrixXd> grad;
  for (std::size_t h = 0; h < language.heads.size(); ++h) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(language.heads[h].rows(), language.heads[h].cols());
    for (const auto& [i, j] : alignment) {
      const auto r = static_cast<Eigen::Index>(i);
      g.row(r) += 2.0 * (language.heads[h].row(r) - object.heads[h].row(static_cast<Eigen::Index>(j)));
    }
    grad.push_back(std::move(g));
  }
  return grad;
}

double embedding_loss(const Eigen::VectorXd& obj_l, const Eigen::VectorXd& obj_v, const Eigen::MatrixXd& w) {
  check_projection(obj_l, obj_v, w);
  return (obj_l - w.transpose() * obj_v).squaredNorm();
}

EmbeddingGradient embedding_loss_gradient(const Eigen::VectorXd& obj_l, const Eigen::VectorXd& obj_v,
                                          const Eigen::MatrixXd& w) {
  check_projection(obj_l, obj_v, w);
  const Eigen::VectorXd r = obj_l - w.transpose() * obj_v;
  return {-2.0 * obj_v * r.transpose(), 2.0 * r, -2.0 * w * r};
}

ProjectionFit fit_projection(const std::vector<ProjectionPair>& pairs) {
  const auto [x, y] = stacked(pairs);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  ProjectionFit fit;
  fit.w = cod.solve(y);
  fit.rank = cod.rank();
  fit.degenerate = fit.rank < x.cols();
  return fit;
}

Eigen::MatrixXd fit_projection_descent(const std::vector<ProjectionPair>& pairs, std::uint64_t seed, int iterations,
                                       double learning_rate) {
  const auto [x, y] = stacked(pairs);
  Rng rng(seed);
  Eigen::MatrixXd w(x.cols(), y.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = 0.01 * rng.normal();
  }
  const double n = static_cast<double>(x.rows());
  for (int it = 0; it < iterations; ++it) w -= learning_rate * (2.0 / n) * x.transpose() * (x * w - y);
  return w;
}

double mean_embedding_loss(const std::vector<ProjectionPair>& pairs, const Eigen::MatrixXd& w) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no projection pairs");
  double sum = 0.0;
  for (const auto& p : pairs) sum += embedding_loss(p.obj_l, p.obj_v, w);
  return sum / static_cast<double>(pairs.size());
}

double normal_equations_residual(const std::vector<ProjectionPair>& pairs, const Eigen::MatrixXd& w) {
  const auto [x, y] = stacked(pairs);
  return (x.transpose() * x * w - x.transpose() * y).norm();
}

double contrastive_loss(const std::vector<std::pair<double, double>>& good_bad_scores, double margin) {
  double loss = 0.0;
  for (const auto& [good, bad] : good_bad_scores) loss += std::max(0.0, margin - good + bad);
  return loss;
}

double contrastive_loss(const std::vector<PreferencePair>& pairs, const Scorer& scorer, double margin) {
  std::vector<std::pair<double, double>> scores;
  for (const auto& p : pairs) scores.emplace_back(scorer(p.good), scorer(p.bad));
  return contrastive_loss(scores, margin);
}

double combined_loss(const LambdaWeights& lambda, double contrastive, double attention, double embedding) {
  for (double l : lambda) {
    if (!(l >= 0.0)) throw Error(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
  return lambda[0] * contrastive + lambda[1] * attention + lambda[2] * embedding;
}

LambdaWeights tune_lambda(const std::vector<LossTerms>& validation, const std::vector<LambdaWeights>& grid) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "no weights to tune over");
  if (validation.empty()) throw Error(ErrorCode::InvalidArgument, "empty validation set");
  std::optional<LambdaWeights> best;
  double best_loss = 0.0;
  for (const auto& lambda : grid) {
    double sum = 0.0;
    for (const auto& t : validation) sum += combined_loss(lambda, t.contrastive, t.attention, t.embedding);
    const double mean = sum / static_cast<double>(validation.size());
    if (!best || mean < best_loss || (mean == best_loss && lambda < *best)) {
      best = lambda;
      best_loss = mean;
    }
  }
  return *best;
}

ScoredResponse score_response(const std::string& text, const Scene& scene,
                              const std::vector<std::vector<std::string>>& references,
                              const PreferenceOptions& options) {
  ScoredResponse out;
  out.text = text;
  ResolveOptions ro;
  ro.lenient = true;
  const GroundedPlan grounded = resolve(parse(text), scene, options.seed, ro);
  out.trace = operationalize(grounded, scene, options.mode);
  out.report = report(out.trace, grounded, references);
  out.good = out.report.stability == 1.0 && !logical_violation(out.trace);
  return out;
}

std::vector<PreferencePair> label_preference(const std::string& prompt_id, const std::vector<std::string>& responses,
                                             const Scene& scene,
                                             const std::vector<std::vector<std::string>>& references,
                                             const PreferenceOptions& options) {
  std::vector<ScoredResponse> good;
  std::vector<ScoredResponse> bad;
  for (const auto& r : responses) {
    ScoredResponse s = score_response(r, scene, references, options);
    (s.good ? good : bad).push_back(std::move(s));
  }
  std::vector<PreferencePair> pairs;
  for (const auto& g : good) {
    for (const auto& b : bad) pairs.push_back({prompt_id, g, b});
  }
  return pairs;
}

LossTerms losses_from_tensors(const TensorFile& file, double margin) {
  auto stack_of = [&](const char* name, AttentionSource source) {
    const Tensor& t = file.at(name);
    if (t.shape.size() != 3) throw Error(ErrorCode::ShapeMismatch, std::string(name) + " must have rank 3");
    AttentionStack s;
    s.source = source;
    for (std::size_t h = 0; h < t.shape[0]; ++h) s.heads.push_back(t.slice(h));
    return s;
  };
  const AttentionStack language = stack_of("attention_language", AttentionSource::LanguageModel);
  const AttentionStack object = stack_of("attention_object", AttentionSource::ObjectModel);

  LossTerms terms;
  if (const Tensor* a = file.find("alignment")) {
    const Eigen::MatrixXd m = a->matrix();
    if (m.cols() != 2) throw Error(ErrorCode::ShapeMismatch, "alignment must be k x 2");
    Alignment alignment;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, 0) < 0 || m(r, 1) < 0) throw Error(ErrorCode::ShapeMismatch, "negative alignment index");
      alignment.emplace_back(static_cast<std::size_t>(m(r, 0)), static_cast<std::size_t>(m(r, 1)));
    }
    terms.attention = attention_loss(language, object, alignment);
  } else {
    terms.attention = attention_loss(language, object);
  }
  terms.embedding = embedding_loss(file.at("object_language").vector(), file.at("object_visual").vector(),
                                   file.at("projection").matrix());
  if (const Tensor* p = file.find("preference_scores")) {
    const Eigen::MatrixXd m = p->matrix();
    if (m.cols() != 2) throw Error(ErrorCode::ShapeMismatch, "preference_scores must be n x 2");
    std::vector<std::pair<double, double>> scores;
    for (Eigen::Index r = 0; r < m.rows(); ++r) scores.emplace_back(m(r, 0), m(r, 1));
    terms.contrastive = contrastive_loss(scores, margin);
  }
  return terms;
}

}  // namespace stackeval
