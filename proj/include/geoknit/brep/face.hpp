#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "geoknit/brep/geometry.hpp"

namespace geoknit {

inline constexpr int kGridRes = 32;                    // samples per side (N_e)
inline constexpr int kGridPoints = kGridRes * kGridRes;  // N_s
inline constexpr double kWeldTolerance = 1e-9;
inline constexpr double kDegeneracy = 1e-12;
/// Face boxes are padded to at least this extent along every axis so that
/// flat faces still encode as non-degenerate boxes.
inline constexpr double kFaceBoxMinThickness = 1e-3;

enum class FaceKind { planar, half_cylinder };

std::string to_string(FaceKind kind);
FaceKind face_kind_from_string(const std::string& s);

struct GridIndex {
  int u = 0;  // column
  int v = 0;  // row
  constexpr int flat() const { return v * kGridRes + u; }
  static constexpr GridIndex from_flat(int i) { return {i % kGridRes, i / kGridRes}; }
  friend constexpr bool operator==(GridIndex, GridIndex) = default;
};

/// One parametric face sampled on a 32x32 grid, row-major over (u, v):
/// points[v * 32 + u].
struct FaceGrid {
  std::vector<Point3> points;
  FaceKind kind = FaceKind::planar;
  int orientation = 1;  // +1 or -1, multiplies the parametric normal

  const Point3& at(int u, int v) const { return points[static_cast<std::size_t>(v * kGridRes + u)]; }
  Point3& at(int u, int v) { return points[static_cast<std::size_t>(v * kGridRes + u)]; }

  friend bool operator==(const FaceGrid&, const FaceGrid&) = default;
};

/// N_e ordered samples along one side of a face grid.
struct BoundaryEdge {
  std::array<Point3, kGridRes> samples;
};

struct FaceEntry {
  FaceGrid grid;
  BoundingBox box;
  friend bool operator==(const FaceEntry&, const FaceEntry&) = default;
};

/// A B-rep-like part: faces plus the designated contact-face indices.
struct PartModel {
  std::vector<FaceEntry> faces;
  std::vector<int> contact_indices;  // sorted, unique, 0-based
  std::string prompt;

  std::size_t size() const { return faces.size(); }
  friend bool operator==(const PartModel&, const PartModel&) = default;
};

/// Throws Error "invalid-model" when contact indices are out of range,
/// unsorted or duplicated, or a box fails to enclose its grid (1e-6).
void validate(const PartModel& model);

/// Samples a 32x32 grid inscribed in `box`.
///
/// planar: the rectangle spanned by the two largest box dimensions, placed
/// at the mid-plane of the smallest one; u runs along the larger of the two.
/// half_cylinder: a half-elliptic-cylinder patch whose axis is the longest
/// box dimension (v), chord along the second-longest, bulging toward the
/// max side of the shortest dimension; u sweeps the arc.
/// Throws Error "degenerate-box" if any dimension is below 1e-12.
FaceGrid decode_face(const BoundingBox& box, FaceKind kind, int orientation = 1);

/// Unit normal at a grid sample: cross product of central-difference
/// tangents (one-sided on the border) times the face orientation.
/// Throws Error "degenerate-normal" when the tangents are parallel or zero.
Point3 face_normal_at(const FaceGrid& face, GridIndex index);
/// All 1024 normals, row-major.
std::vector<Point3> face_normals(const FaceGrid& face);

/// AABB of the grid, padded to kFaceBoxMinThickness along every axis.
BoundingBox face_box(const FaceGrid& face);

/// Boundary side k of the grid, walked counter-clockwise in (u, v):
/// 0 = v=0 (u ascending), 1 = u=31 (v ascending), 2 = v=31 (u descending),
/// 3 = u=0 (v descending). Consecutive edges share their corner samples.
BoundaryEdge boundary_edge(const FaceGrid& face, int k);
std::array<BoundaryEdge, 4> boundary_edges(const FaceGrid& face);

/// Builds a planar-kind grid by bilinear interpolation of four corners
/// c00 (u=0,v=0), c10 (u=1,v=0), c01, c11.
FaceGrid bilinear_face(Point3 c00, Point3 c10, Point3 c01, Point3 c11, int orientation = 1);

FaceEntry make_face_entry(FaceGrid grid);

}  // namespace geoknit
