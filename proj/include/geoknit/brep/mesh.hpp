#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geoknit/brep/face.hpp"
#include "geoknit/simd/kernels.hpp"

namespace geoknit {

struct Triangle {
  Point3 a, b, c;
  double area() const { return 0.5 * norm(cross(b - a, c - a)); }
};

struct TriangleSoup {
  std::vector<Triangle> triangles;
  std::size_t size() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }
};

inline constexpr double kMinTriangleArea = 1e-12;

/// Two triangles per grid cell, split along the shorter diagonal, wound so
/// their normals follow the (u, v) parametric normal. Triangles with area
/// <= 1e-12 are dropped.
TriangleSoup triangulate(const FaceGrid& face);
/// Concatenation of triangulate() over every face of the model.
TriangleSoup triangulate(const PartModel& model);

/// Closest point on a single triangle (a non-degenerate one).
Point3 closest_point_on_triangle(Point3 p, const Triangle& t);

/// Triangles in the structure-of-arrays layout the distance kernels expect.
class PackedTriangles {
 public:
  PackedTriangles() = default;
  explicit PackedTriangles(std::span<const Triangle> tris);

  std::size_t size() const { return count_; }
  simd::TriangleArrays arrays() const;

 private:
  std::size_t count_ = 0;
  std::vector<double> data_;  // 25 fields x count_
};

struct ClosestHit {
  double sq_dist = 0.0;
  std::size_t triangle = 0;  // index into the source soup
};

/// Bounding-volume hierarchy over a triangle soup answering exact
/// closest-triangle queries. Ties resolve to the lowest source index, so
/// results match a linear scan exactly.
class TriangleBvh {
 public:
  TriangleBvh() = default;
  explicit TriangleBvh(const TriangleSoup& soup);

  bool empty() const { return order_.empty(); }
  /// Throws Error "empty-mesh" on an empty hierarchy.
  ClosestHit closest(Point3 p) const;
  /// Like closest() but ignores triangles farther than sqrt(bound_sq); returns
  /// false (hit untouched) when nothing is within the bound.
  bool closest_within(Point3 p, double bound_sq, ClosestHit& hit) const;

 private:
  struct Node {
    BoundingBox box;
    int left = -1;  // child indices, -1 for leaves
    int right = -1;
    std::size_t begin = 0;
    std::size_t end = 0;
  };
  int build(std::vector<std::size_t>& idx, const std::vector<Point3>& centroids,
            const std::vector<BoundingBox>& boxes, std::size_t begin, std::size_t end);
  void search(Point3 p, ClosestHit& best, bool& found) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> order_;  // packed position -> source index
  PackedTriangles packed_;
};

/// Exact Euclidean distance from p to the closest point of the soup by
/// linear scan. Throws Error "empty-mesh".
double point_to_mesh_distance(Point3 p, const TriangleSoup& mesh);
ClosestHit closest_triangle_linear(Point3 p, const TriangleSoup& mesh);

/// Cached per-face acceleration data: triangulation, hierarchy, normals and
/// the grid in SoA form for nearest-sample lookup.
class FaceQuery {
 public:
  explicit FaceQuery(const FaceGrid& face);

  struct Projection {
    Point3 point;
    GridIndex index;
    double distance = 0.0;
  };

  const FaceGrid& face() const { return face_; }
  const TriangleSoup& mesh() const { return mesh_; }
  const TriangleBvh& bvh() const { return bvh_; }
  const Point3& normal(GridIndex i) const { return normals_[static_cast<std::size_t>(i.flat())]; }

  double distance(Point3 p) const;
  Projection project(Point3 p) const;
  GridIndex nearest_sample(Point3 p) const;

 private:
  FaceGrid face_;
  TriangleSoup mesh_;
  TriangleBvh bvh_;
  std::vector<Point3> normals_;
  std::vector<double> xs_, ys_, zs_;
};

/// Closest point on the triangulated face, with the grid index of the
/// sample nearest to that point.
FaceQuery::Projection project_to_face(Point3 p, const FaceGrid& face);

}  // namespace geoknit
