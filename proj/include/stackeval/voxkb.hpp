#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stackeval/geometry.hpp"

namespace stackeval {

enum class IntrinsicClass { Flat, Round, Mixed };
enum class SurfaceClass { Flat, Round, Point };
enum class FootprintShape { Rect, Disk };
enum class Behavior { Roll, Slide, StackTarget, Stackable };
// Solid used for world bounds.
enum class GeometryKind { Box, Ellipsoid, Cylinder, Capsule };

std::string_view to_string(IntrinsicClass c);
std::string_view to_string(SurfaceClass c);
std::string_view to_string(Behavior b);

// A conditioning orientation: while `up_axis` points at world up, the object
// rests on `support` and affords the listed behaviors. A habitat with a flat
// support and the stack_target affordance also exposes a flat top of the same
// footprint.
struct Habitat {
  Axis up_axis = Axis::PosY;
  SurfaceClass support = SurfaceClass::Flat;
  FootprintShape footprint = FootprintShape::Rect;
  double footprint_scale = 1.0;
  std::set<Behavior> afforded;

  bool affords(Behavior b) const { return afforded.count(b) > 0; }
  bool flat_top() const { return affords(Behavior::StackTarget); }
};

struct Voxeme {
  std::string name;
  GeometryKind geometry = GeometryKind::Box;
  std::vector<PrincipalAxis> symmetry_axes;
  std::vector<Habitat> habitats;
  IntrinsicClass intrinsic_class = IntrinsicClass::Flat;
  Vec3 default_dims = Vec3::Ones();
};

// Deviation allowed between a habitat's up axis and world up.
inline constexpr double kHabitatToleranceRad = 10.0 * M_PI / 180.0;

// Habitat reported when an object without a round habitat sits in no
// recognised orientation (a tipped cube balancing on an edge).
const Habitat& unaligned_habitat();

// Flat habitats within tolerance win (smallest deviation first); otherwise
// the round habitat with the smallest deviation; otherwise unaligned.
const Habitat& active_habitat(const Voxeme& voxeme, const Rotation& rotation,
                              double tolerance = kHabitatToleranceRad);

// Index into voxeme.habitats, or nullopt for the unaligned habitat.
std::optional<std::size_t> active_habitat_index(const Voxeme& voxeme, const Rotation& rotation,
                                                double tolerance = kHabitatToleranceRad);

// Canonical rotation placing the habitat's up axis at world up.
Rotation habitat_rotation(const Habitat& habitat);

void validate(const Voxeme& voxeme);

class VoxKb {
 public:
  // Parses the JSON knowledge-base document (see docs/formats.md).
  static VoxKb parse(std::string_view text);
  static VoxKb load(const std::filesystem::path& path);
  static std::filesystem::path default_path();
  // Process-wide copy of the shipped knowledge base, loaded on first use.
  static std::shared_ptr<const VoxKb> shared_default();

  const Voxeme& lookup(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;
  int version() const { return version_; }

 private:
  int version_ = 0;
  std::map<std::string, Voxeme, std::less<>> voxemes_;
};

}  // namespace stackeval
