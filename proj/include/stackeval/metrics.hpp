#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stackeval/executor.hpp"

namespace stackeval {

inline constexpr double kDisplacementTolerance = 0.1;  // m

// Centre-of-mass displacement of one object between two scenes.
double displacement(const Scene& before, const Scene& after, const ObjectId& id);

// Fraction of `placed` whose displacement is within tolerance; 1 when empty.
double stability(const Scene& before, const Scene& after, const std::vector<ObjectId>& placed,
                 double tolerance = kDisplacementTolerance);

struct IouResult {
  double value = 0.0;
  std::size_t reference = 0;  // index of the best reference (first on ties)
};

// Shape-multiset intersection over union, maximised over references.
// Throws InvalidArgument when references is empty.
IouResult iou(const std::vector<std::string>& selected_shapes,
              const std::vector<std::vector<std::string>>& references);
IouResult iou(const std::vector<ObjectId>& selected, const Scene& scene,
              const std::vector<std::vector<std::string>>& references);

struct EvalReport {
  double stability = 1.0;
  double iou = 0.0;
  std::optional<std::size_t> failure_step;
  std::optional<FailureReason> failure_reason;
  std::map<ObjectId, double> per_object_displacement;
  ExecutionMode mode = ExecutionMode::Permissive;
  std::size_t reference_used = 0;
  std::vector<ObjectId> selected;
  std::vector<ObjectId> placed;
  std::vector<ObjectId> displaced;
};

EvalReport report(const ExecutionTrace& trace, const GroundedPlan& plan,
                  const std::vector<std::vector<std::string>>& references,
                  double tolerance = kDisplacementTolerance);

// Single-line JSON with sorted keys.
std::string to_json(const EvalReport& report);

}  // namespace stackeval
