#pragma once

#include <array>
#include <cmath>

namespace geoknit {

/// A point or vector in model space (1 unit = 1 mm after normalization).
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Point3 operator-(Point3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Point3 operator*(Point3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  constexpr Point3& operator+=(Point3 b) { x += b.x; y += b.y; z += b.z; return *this; }
  constexpr Point3& operator-=(Point3 b) { x -= b.x; y -= b.y; z -= b.z; return *this; }
  friend constexpr bool operator==(Point3, Point3) = default;
};

inline constexpr double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline constexpr double squared_norm(Point3 a) { return dot(a, a); }
inline double distance(Point3 a, Point3 b) { return norm(a - b); }
inline bool is_finite(Point3 a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

/// Axis-aligned box given by its two corners. `min_corner <= max_corner`
/// component-wise for a valid box.
struct BoundingBox {
  Point3 min_corner;
  Point3 max_corner;

  Point3 center() const { return 0.5 * (min_corner + max_corner); }
  Point3 dims() const { return max_corner - min_corner; }
  bool valid() const;
  bool contains(Point3 p, double tol = 0.0) const;
  bool contains(const BoundingBox& other, double tol = 0.0) const;
  BoundingBox inflated(double margin) const;
  bool overlaps(const BoundingBox& other) const;
  /// Squared distance from p to the box (0 inside).
  double sq_distance(Point3 p) const;

  /// Flat encoding [xmin, ymin, zmin, xmax, ymax, zmax].
  std::array<double, 6> encode() const;
  static BoundingBox decode(const std::array<double, 6>& v);
  /// Smallest box containing both corners of v regardless of their order.
  static BoundingBox from_unordered(const std::array<double, 6>& v);

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

BoundingBox bounding_box_of(const Point3* points, std::size_t n);
BoundingBox box_union(const BoundingBox& a, const BoundingBox& b);

}  // namespace geoknit
