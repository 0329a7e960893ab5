#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stackeval/executor.hpp"
#include "stackeval/metrics.hpp"
#include "stackeval/physics.hpp"
#include "stackeval/plan.hpp"
#include "stackeval/similarity.hpp"

namespace stackeval {

// Probe samples drawn per (shape, habitat) for the training arena.
inline constexpr int kArenaSamples = 10;
// Probe samples voted over when grounding an object in a scene.
inline constexpr int kGroundingSamples = 3;
// Horizontal pose jitter of a probe, m.
inline constexpr double kProbeJitter = 0.01;

std::optional<std::size_t> detect_failure(const ExecutionTrace& trace);

struct ProbeOptions {
  std::optional<Rotation> rotation;  // default: the object's current rotation
  Vec3 jitter = Vec3::Zero();        // horizontal offset on top of the agent cube
};

// Stacks a copy of the object on a unit cube standing in for the agent and
// settles. The input scene is untouched.
TrajectoryTrace stack_probe(const Scene& scene, const ObjectId& id, const ProbeOptions& options = {});

// Labeled probe features for every non-mixed shape in every habitat.
std::vector<LabeledFeatures> probe_arena(const VoxKb& kb, std::uint64_t seed, int samples = kArenaSamples);

GroundingModel train_default_model(const std::shared_ptr<const VoxKb>& kb, std::uint64_t seed);

struct HabitatGrounding {
  ObjectId object;
  std::string shape;
  std::string orientation;  // habitat up axis
  GroundLabel label = GroundLabel::Round;
  std::vector<std::string> neighbors;  // reference trace ids
};

// Majority label over jittered probes of the object held at `rotation`.
HabitatGrounding ground_object(const Scene& scene, const ObjectId& id, const Rotation& rotation,
                               const GroundingModel& model, std::uint64_t seed,
                               int samples = kGroundingSamples);

struct HabitatChoice {
  Rotation rotation;
  Axis up_axis = Axis::PosY;
  std::vector<HabitatGrounding> tried;
};

// First habitat, in knowledge-base order, whose probes ground Flat.
// Throws Immovable or NoFlatHabitat.
HabitatChoice determine_habitat(const Scene& scene, const ObjectId& id, const GroundingModel& model,
                                std::uint64_t seed);

struct Staircase {
  Plan plan;
  ObjectId platform;
  std::vector<HabitatGrounding> decisions;
};

// Columns of 1..m flat-grounded objects against the nearest platform, with
// m = ceil(target / jump). Throws Unsolvable.
Staircase synthesize_staircase(const Scene& scene, double target_height, double jump,
                               const GroundingModel& model, std::uint64_t seed);

struct Exploration {
  std::optional<std::size_t> trigger;
  std::vector<HabitatGrounding> decisions;
  std::optional<Plan> plan;
  std::optional<EvalReport> report;
  Reachability reach;
};

// Runs the plan strictly; on failure, synthesizes and scores a staircase to
// the nearest platform's top.
Exploration explore(const Scene& scene, const GroundedPlan& plan,
                    const std::vector<std::vector<std::string>>& references, const GroundingModel& model,
                    std::uint64_t seed);

}  // namespace stackeval
