#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stackeval/scene.hpp"
#include "stackeval/voxkb.hpp"

namespace stackeval {

enum class GroundLabel { Flat, Round };

std::string_view to_string(GroundLabel label);
GroundLabel parse_label(std::string_view text);

// Feature order (frozen):
//   0 net vertical drop of the centre of mass, m
//   1 net lateral drift, m
//   2 max tilt change from the first sample, rad
//   3 1 if the object ends on the ground
//   4-6 one-hot contact surface at the start: flat, round, point
//   7 number of samples
inline constexpr int kFeatureDim = 8;
inline constexpr int kEmbeddingDim = 4;
inline constexpr int kNeighbors = 5;

// `object` supplies dims for the ground test. Throws DegenerateTrace for
// fewer than two samples.
Eigen::VectorXd featurize(const TrajectoryTrace& trace, const SceneObject& object, const Voxeme& voxeme);

struct LabeledFeatures {
  Eigen::VectorXd features;
  GroundLabel label = GroundLabel::Flat;
  std::string shape;
  std::string orientation;  // habitat up axis at probe time
  std::string trace_id;
};

struct BehaviorEmbedding {
  Eigen::VectorXd vector;  // unit length
  std::string shape;
  std::string orientation;
  std::string trace_id;
  std::optional<GroundLabel> label;
};

struct TrainOptions {
  int iterations = 300;
  double learning_rate = 0.5;
  double same_margin = 0.8;
  double different_margin = -0.2;
};

struct GroundingModel {
  Eigen::VectorXd mean;          // feature standardisation
  Eigen::VectorXd scale;
  Eigen::MatrixXd transform;     // kEmbeddingDim x kFeatureDim
  std::vector<BehaviorEmbedding> references;
  int k = kNeighbors;

  BehaviorEmbedding embed(const Eigen::VectorXd& features) const;
};

// Throws InsufficientData when a label has fewer than two samples and
// InvalidArgument for shapes whose voxeme is mixed.
GroundingModel train_similarity(const std::vector<LabeledFeatures>& samples, std::uint64_t seed,
                                const VoxKb& kb, const TrainOptions& options = {});

struct Neighbor {
  std::size_t index = 0;  // into model.references
  double similarity = 0.0;
};

struct Grounding {
  GroundLabel label = GroundLabel::Flat;
  std::vector<Neighbor> neighbors;
};

Grounding ground(const GroundingModel& model, const BehaviorEmbedding& embedding);

// Mean cosine similarity within and across labels over the references.
std::pair<double, double> cluster_similarity(const GroundingModel& model);

void save_model(const GroundingModel& model, const std::filesystem::path& path);
GroundingModel load_model(const std::filesystem::path& path);
std::string serialize_model(const GroundingModel& model);
GroundingModel parse_model(std::string_view text);

}  // namespace stackeval
