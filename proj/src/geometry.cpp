#include "stackeval/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "stackeval/error.hpp"

namespace stackeval {

Vec3 axis_vector(Axis axis) {
  switch (axis) {
    case Axis::PosX: return Vec3(1, 0, 0);
    case Axis::NegX: return Vec3(-1, 0, 0);
    case Axis::PosY: return Vec3(0, 1, 0);
    case Axis::NegY: return Vec3(0, -1, 0);
    case Axis::PosZ: return Vec3(0, 0, 1);
    case Axis::NegZ: return Vec3(0, 0, -1);
  }
  return Vec3(0, 1, 0);
}

PrincipalAxis principal(Axis axis) {
  switch (axis) {
    case Axis::PosX:
    case Axis::NegX: return PrincipalAxis::X;
    case Axis::PosY:
    case Axis::NegY: return PrincipalAxis::Y;
    default: return PrincipalAxis::Z;
  }
}

std::string_view axis_name(Axis axis) {
  switch (axis) {
    case Axis::PosX: return "+x";
    case Axis::NegX: return "-x";
    case Axis::PosY: return "+y";
    case Axis::NegY: return "-y";
    case Axis::PosZ: return "+z";
    case Axis::NegZ: return "-z";
  }
  return "+y";
}

Axis parse_axis(std::string_view text) {
  static constexpr Axis kAll[] = {Axis::PosX, Axis::NegX, Axis::PosY,
                                  Axis::NegY, Axis::PosZ, Axis::NegZ};
  for (Axis a : kAll) {
    if (axis_name(a) == text) return a;
  }
  if (text == "x") return Axis::PosX;
  if (text == "y") return Axis::PosY;
  if (text == "z") return Axis::PosZ;
  throw Error(ErrorCode::Parse, "bad axis '" + std::string(text) + "'");
}

std::string_view principal_axis_name(PrincipalAxis axis) {
  switch (axis) {
    case PrincipalAxis::X: return "x";
    case PrincipalAxis::Y: return "y";
    case PrincipalAxis::Z: return "z";
  }
  return "y";
}

PrincipalAxis parse_principal_axis(std::string_view text) {
  if (text == "x" || text == "X") return PrincipalAxis::X;
  if (text == "y" || text == "Y") return PrincipalAxis::Y;
  if (text == "z" || text == "Z") return PrincipalAxis::Z;
  throw Error(ErrorCode::Parse, "bad principal axis '" + std::string(text) + "'");
}

Rotation rotation_aligning(Axis local_up) {
  const double h = std::sqrt(0.5);
  switch (local_up) {
    case Axis::PosY: return Rotation(1, 0, 0, 0);
    case Axis::NegY: return Rotation(0, 1, 0, 0);   // 180 deg about x
    case Axis::PosX: return Rotation(h, 0, 0, h);   // +90 deg about z
    case Axis::NegX: return Rotation(h, 0, 0, -h);  // -90 deg about z
    case Axis::PosZ: return Rotation(h, -h, 0, 0);  // -90 deg about x
    case Axis::NegZ: return Rotation(h, h, 0, 0);   // +90 deg about x
  }
  return Rotation::Identity();
}

Rotation rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double d = a.dot(b);
  if (d >= 1.0 - 1e-15) return Rotation::Identity();
  if (d <= -1.0 + 1e-15) {
    Vec3 ortho = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitZ();
    Vec3 axis = a.cross(ortho).normalized();
    return Rotation(0, axis.x(), axis.y(), axis.z());
  }
  return Rotation::FromTwoVectors(a, b);
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) return 0.0;
  return std::acos(std::clamp(a.dot(b) / denom, -1.0, 1.0));
}

double rotation_distance(const Rotation& a, const Rotation& b) {
  const double d = std::abs(a.coeffs().dot(b.coeffs()));
  return 2.0 * std::acos(std::clamp(d, 0.0, 1.0));
}

bool exactly_equal(const Rotation& a, const Rotation& b) {
  return a.w() == b.w() && a.x() == b.x() && a.y() == b.y() && a.z() == b.z();
}

Rotation rotation_from_axis_angle(const Vec3& axis, double degrees) {
  return Rotation(Eigen::AngleAxisd(degrees * M_PI / 180.0, axis.normalized()));
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dz = b.z - a.z;
  const double len2 = dx * dx + dz * dz;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x;
  const double ez = a.z + t * dz - p.z;
  return std::sqrt(ex * ex + ez * ez);
}

}  // namespace

Polygon2 convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.z < b.z);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point2 a, Point2 b) { return a.x == b.x && a.z == b.z; }),
            pts.end());
  if (pts.size() < 3) return pts;

  Polygon2 hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool contains(const Polygon2& hull, Point2 p, double eps) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return distance_to_segment(p, hull[0], hull[0]) <= eps;
  if (hull.size() == 2) return distance_to_segment(p, hull[0], hull[1]) <= eps;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i];
    const Point2 b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.z - a.z);
    if (cross(a, b, p) < -eps * len) return false;
  }
  return true;
}

Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip) {
  if (subject.size() < 3 || clip.size() < 3) return {};
  Polygon2 output = subject;
  for (std::size_t i = 0; i < clip.size() && !output.empty(); ++i) {
    const Point2 a = clip[i];
    const Point2 b = clip[(i + 1) % clip.size()];
    Polygon2 input;
    input.swap(output);
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Point2 cur = input[j];
      const Point2 prev = input[(j + input.size() - 1) % input.size()];
      const double c_cur = cross(a, b, cur);
      const double c_prev = cross(a, b, prev);
      const bool in_cur = c_cur >= 0;
      const bool in_prev = c_prev >= 0;
      if (in_cur != in_prev) {
        const double t = c_prev / (c_prev - c_cur);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.z + t * (cur.z - prev.z)});
      }
      if (in_cur) output.push_back(cur);
    }
  }
  return output;
}

double area(const Polygon2& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[(i + 1) % polygon.size()];
    twice += a.x * b.z - b.x * a.z;
  }
  return 0.5 * std::abs(twice);
}

double Aabb::overlap(const Aabb& other, int axis) const {
  return std::min(max[axis], other.max[axis]) - std::max(min[axis], other.min[axis]);
}

bool Aabb::penetrates(const Aabb& other, double tolerance) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (overlap(other, axis) <= tolerance) return false;
  }
  return true;
}

}  // namespace stackeval
