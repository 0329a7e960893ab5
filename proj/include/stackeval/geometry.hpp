#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>

namespace stackeval {

using Vec3 = Eigen::Vector3d;
using Rotation = Eigen::Quaterniond;

// World frame: +Y is up, the ground is the plane y = 0.
inline Vec3 world_up() { return Vec3::UnitY(); }

enum class PrincipalAxis { X, Y, Z };

// Signed object-local axis.
enum class Axis { PosX, NegX, PosY, NegY, PosZ, NegZ };

Vec3 axis_vector(Axis axis);
PrincipalAxis principal(Axis axis);
std::string_view axis_name(Axis axis);  // "+x", "-y", ...
Axis parse_axis(std::string_view text);
std::string_view principal_axis_name(PrincipalAxis axis);
PrincipalAxis parse_principal_axis(std::string_view text);

// Exact rotation taking the given local axis onto world up (no yaw).
Rotation rotation_aligning(Axis local_up);

// Smallest rotation taking `from` onto `to` (both unit).
Rotation rotation_between(const Vec3& from, const Vec3& to);

double angle_between(const Vec3& a, const Vec3& b);

// Angle of the relative rotation a^-1 * b, in [0, pi].
double rotation_distance(const Rotation& a, const Rotation& b);

bool exactly_equal(const Rotation& a, const Rotation& b);

Rotation rotation_from_axis_angle(const Vec3& axis, double degrees);

struct Point2 {
  double x = 0.0;
  double z = 0.0;
};

// Convex polygon in the horizontal (x, z) plane, counter-clockwise.
using Polygon2 = std::vector<Point2>;

Polygon2 convex_hull(std::vector<Point2> points);
bool contains(const Polygon2& hull, Point2 p, double eps = 1e-9);
// Intersection of two convex polygons (Sutherland-Hodgman).
Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip);
double area(const Polygon2& polygon);

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min + max); }
  // Overlap depth along each axis exceeds `tolerance` on all three axes.
  bool penetrates(const Aabb& other, double tolerance) const;
  double overlap(const Aabb& other, int axis) const;
};

}  // namespace stackeval
