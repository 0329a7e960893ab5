#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stackeval/executor.hpp"
#include "stackeval/metrics.hpp"
#include "stackeval/tensor_file.hpp"

namespace stackeval {

enum class AttentionSource { LanguageModel, ObjectModel };

struct AttentionStack {
  std::vector<Eigen::MatrixXd> heads;  // query tokens x attended positions
  AttentionSource source = AttentionSource::LanguageModel;

  // Rows non-negative and summing to 1.
  bool row_stochastic(double tolerance = 1e-6) const;
};

// Row i of the language stack corresponds to row j of the object stack.
using Alignment = std::vector<std::pair<std::size_t, std::size_t>>;

// Every row aligned with the same row. Requires equal row counts.
Alignment identity_alignment(const AttentionStack& stack);

// Sum over heads and aligned rows of the squared row difference.
double attention_loss(const AttentionStack& language, const AttentionStack& object, const Alignment& alignment);
double attention_loss(const AttentionStack& language, const AttentionStack& object);

// d loss / d language heads (zero on unaligned rows).
std::vector<Eigen::MatrixXd> attention_loss_gradient(const AttentionStack& language, const AttentionStack& object,
                                                     const Alignment& alignment);

// || obj_l - obj_v W ||^2 with obj_v a row vector and W of shape V x L.
double embedding_loss(const Eigen::VectorXd& obj_l, const Eigen::VectorXd& obj_v, const Eigen::MatrixXd& w);

struct EmbeddingGradient {
  Eigen::MatrixXd w;
  Eigen::VectorXd obj_l;
  Eigen::VectorXd obj_v;
};

EmbeddingGradient embedding_loss_gradient(const Eigen::VectorXd& obj_l, const Eigen::VectorXd& obj_v,
                                          const Eigen::MatrixXd& w);

struct ProjectionPair {
  Eigen::VectorXd obj_v;
  Eigen::VectorXd obj_l;
};

struct ProjectionFit {
  Eigen::MatrixXd w;
  Eigen::Index rank = 0;
  bool degenerate = false;  // rank below V: w is the minimum-norm solution
};

// Least-squares W over all pairs. Throws ShapeMismatch or InvalidArgument.
ProjectionFit fit_projection(const std::vector<ProjectionPair>& pairs);

// Mean embedding loss minimised by plain gradient descent from a seeded start.
Eigen::MatrixXd fit_projection_descent(const std::vector<ProjectionPair>& pairs, std::uint64_t seed,
                                       int iterations = 2000, double learning_rate = 0.1);

double mean_embedding_loss(const std::vector<ProjectionPair>& pairs, const Eigen::MatrixXd& w);

// Frobenius norm of X^T X W - X^T Y.
double normal_equations_residual(const std::vector<ProjectionPair>& pairs, const Eigen::MatrixXd& w);

inline constexpr double kDefaultMargin = 1.0;

struct ScoredResponse {
  std::string text;
  EvalReport report;
  ExecutionTrace trace;
  bool good = false;
};

struct PreferencePair {
  std::string prompt_id;
  ScoredResponse good;
  ScoredResponse bad;
};

using Scorer = std::function<double(const ScoredResponse&)>;

// Sum of max(0, margin - score(good) + score(bad)).
double contrastive_loss(const std::vector<PreferencePair>& pairs, const Scorer& scorer,
                        double margin = kDefaultMargin);
double contrastive_loss(const std::vector<std::pair<double, double>>& good_bad_scores,
                        double margin = kDefaultMargin);

using LambdaWeights = std::array<double, 3>;  // contrastive, attention, embedding

// Throws InvalidArgument for a negative weight.
double combined_loss(const LambdaWeights& lambda, double contrastive, double attention, double embedding);

struct LossTerms {
  double contrastive = 0.0;
  double attention = 0.0;
  double embedding = 0.0;
};

// Grid point with the lowest mean combined loss; ties go to the
// lexicographically smallest weights. Throws EmptyGrid.
LambdaWeights tune_lambda(const std::vector<LossTerms>& validation, const std::vector<LambdaWeights>& grid);

struct PreferenceOptions {
  ExecutionMode mode = ExecutionMode::Permissive;
  std::uint64_t seed = 0;
};

// Simulates one response: parse, lenient resolve, operationalize, report.
ScoredResponse score_response(const std::string& text, const Scene& scene,
                              const std::vector<std::vector<std::string>>& references,
                              const PreferenceOptions& options = {});

// Good iff stability is 1 and no step failed on an unknown object or a
// collision at the target. Pairs are every good response against every bad.
std::vector<PreferencePair> label_preference(const std::string& prompt_id, const std::vector<std::string>& responses,
                                             const Scene& scene,
                                             const std::vector<std::vector<std::string>>& references,
                                             const PreferenceOptions& options = {});

// Loss terms read from a tensor file. Tensors: attention_language and
// attention_object (heads x rows x cols), optional alignment (k x 2),
// object_language (L), object_visual (V), projection (V x L), optional
// preference_scores (n x 2 of good, bad).
LossTerms losses_from_tensors(const TensorFile& file, double margin = kDefaultMargin);

}  // namespace stackeval
