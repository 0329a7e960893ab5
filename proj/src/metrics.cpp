#include "stackeval/metrics.hpp"

#include <algorithm>

#include "json.hpp"

namespace stackeval {

double displacement(const Scene& before, const Scene& after, const ObjectId& id) {
  const SceneObject& a = before.at(id);
  const SceneObject& b = after.at(id);
  return (center_of_mass(b, after.voxeme_of(b)) - center_of_mass(a, before.voxeme_of(a))).norm();
}

double stability(const Scene& before, const Scene& after, const std::vector<ObjectId>& placed, double tolerance) {
  if (placed.empty()) return 1.0;
  std::size_t kept = 0;
  for (const auto& id : placed) kept += displacement(before, after, id) <= tolerance ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(placed.size());
}

IouResult iou(const std::vector<std::string>& selected, const std::vector<std::vector<std::string>>& references) {
  if (references.empty()) throw Error(ErrorCode::InvalidArgument, "iou needs at least one reference set");
  std::map<std::string, int> s;
  for (const auto& shape : selected) ++s[shape];
  IouResult best;
  bool first = true;
  for (std::size_t r = 0; r < references.size(); ++r) {
    std::map<std::string, int> ref;
    for (const auto& shape : references[r]) ++ref[shape];
    int inter = 0;
    for (const auto& [shape, n] : s) {
      auto it = ref.find(shape);
      if (it != ref.end()) inter += std::min(n, it->second);
    }
    const int uni = static_cast<int>(selected.size() + references[r].size()) - inter;
    const double value = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
    if (first || value > best.value) {
      best = {value, r};
      first = false;
    }
  }
  return best;
}

IouResult iou(const std::vector<ObjectId>& selected, const Scene& scene,
              const std::vector<std::vector<std::string>>& references) {
  std::vector<std::string> shapes;
  for (const auto& id : selected) shapes.push_back(scene.at(id).shape);
  return iou(shapes, references);
}

EvalReport report(const ExecutionTrace& trace, const GroundedPlan& plan,
                  const std::vector<std::vector<std::string>>& references, double tolerance) {
  EvalReport r;
  r.mode = trace.mode;
  r.placed = trace.placed;
  r.stability = stability(trace.configured, trace.settled, trace.placed, tolerance);
  for (const auto& id : trace.placed) r.per_object_displacement[id] = displacement(trace.configured, trace.settled, id);
  r.selected = selected_ids(plan, trace.initial);
  const IouResult best = iou(r.selected, trace.initial, references);
  r.iou = best.value;
  r.reference_used = best.reference;
  r.failure_step = trace.failure_step();
  if (r.failure_step) r.failure_reason = trace.steps[*r.failure_step].reason;
  r.displaced.assign(trace.displaced.begin(), trace.displaced.end());
  return r;
}

std::string to_json(const EvalReport& r) {
  nlohmann::json j;
  j["stability"] = r.stability;
  j["iou"] = r.iou;
  j["failure_step"] = r.failure_step ? nlohmann::json(*r.failure_step) : nlohmann::json(nullptr);
  j["failure_reason"] =
      r.failure_reason ? nlohmann::json(std::string(to_string(*r.failure_reason))) : nlohmann::json(nullptr);
  j["per_object_displacement"] = r.per_object_displacement;
  j["mode"] = std::string(to_string(r.mode));
  j["reference_used"] = r.reference_used;
  j["selected"] = r.selected;
  j["placed"] = r.placed;
  j["displaced"] = r.displaced;
  return j.dump();
}

}  // namespace stackeval
