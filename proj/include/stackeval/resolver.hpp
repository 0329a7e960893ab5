#pragma once

#include <cstdint>

#include "stackeval/plan.hpp"
#include "stackeval/scene.hpp"

namespace stackeval {

struct ResolveOptions {
  // Record unknown references on the step instead of throwing.
  bool lenient = false;
};

// Binds every reference to scene instances and draws placement samples.
// Ambiguous references go to the instance nearest the agent (ties by id).
// Throws UnknownObject unless lenient.
GroundedPlan resolve(const Plan& plan, const Scene& scene, std::uint64_t seed, ResolveOptions options = {});

// Number of ground-position draws stored per step.
inline constexpr int kGroundSamples = 24;

}  // namespace stackeval
