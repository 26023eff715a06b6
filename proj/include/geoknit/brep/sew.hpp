#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "geoknit/brep/mesh.hpp"

namespace geoknit {

inline constexpr double kSolidWeldTolerance = 1e-5;
inline constexpr double kSewTolerance = 0.15;

/// Indexed mesh obtained by merging soup vertices closer than a tolerance.
/// Triangles that collapse under the merge are dropped.
struct WeldedMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

WeldedMesh weld(const TriangleSoup& soup, double tol = kSolidWeldTolerance);
/// Number of edges not shared by exactly two triangles.
std::size_t open_edge_count(const WeldedMesh& mesh);
bool is_watertight(const TriangleSoup& soup, double tol = kSolidWeldTolerance);

/// Number of triangles hit by the ray origin + s*dir, s > 0.
int count_ray_crossings(const TriangleSoup& soup, Point3 origin, Point3 dir);
/// Parity inside test, majority over three fixed skew directions.
bool point_inside(const TriangleSoup& soup, Point3 p);

/// Snaps the corners of planar faces that lie within `tol` of each other to
/// their cluster mean and rebuilds those faces bilinearly. Non-planar faces
/// are copied unchanged.
PartModel sew_faces(const PartModel& model, double tol = kSewTolerance);

/// Sets every face orientation so normals point out of the solid. Uses ray
/// parity on watertight models, otherwise points normals away from the
/// vertex centroid.
void orient_faces(PartModel& model);

}  // namespace geoknit
