#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stackeval/physics.hpp"
#include "stackeval/plan.hpp"

namespace stackeval {

// Strict settles after every placement and fails a step that displaces
// anything; permissive places every step, then settles once.
enum class ExecutionMode { Strict, Permissive };

std::string_view to_string(ExecutionMode mode);
ExecutionMode parse_mode(std::string_view text);

enum class StepStatus { Executed, Failed, Ignored, NotExecuted };
enum class FailureReason { UnknownObject, Immovable, CollisionAtTarget, Displaced, Unreachable };

std::string_view to_string(StepStatus status);
std::string_view to_string(FailureReason reason);

struct StepOutcome {
  StepStatus status = StepStatus::NotExecuted;
  std::optional<FailureReason> reason;
  std::string detail;
  std::vector<ObjectId> moved;
};

struct ExecutionTrace {
  ExecutionMode mode = ExecutionMode::Permissive;
  std::vector<StepOutcome> steps;
  Scene initial;
  Scene configured;   // placements applied, before settling
  Scene settled;      // settle(configured)
  Scene final_scene;  // committed result
  std::vector<TrajectoryTrace> traces;
  std::set<ObjectId> displaced;
  std::vector<ObjectId> placed;  // objects the executed steps arranged

  std::optional<std::size_t> failure_step() const;
};

// Rotation realising an orientation phrase for this voxeme; unrealisable
// requests keep the current rotation.
Rotation target_rotation(const Voxeme& voxeme, const Rotation& current, const OrientationRef& orientation);

// Never throws for plan content; failures are recorded on the step.
ExecutionTrace operationalize(const GroundedPlan& plan, const Scene& scene, ExecutionMode mode);

}  // namespace stackeval
