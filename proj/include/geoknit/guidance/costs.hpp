#pragma once

#include <array>
#include <vector>

#include "geoknit/assign/hungarian.hpp"
#include "geoknit/brep/boxset.hpp"
#include "geoknit/brep/mesh.hpp"

namespace geoknit {

/// Mean over guide rows j of min over candidate rows i of
/// |c_i - c'_j| + |d_i - d'_j| (centers and max - min dims). Throws Error
/// "empty-set" when either side is empty.
double d_geo(const BoxSet& candidate, const BoxSet& guide);

/// The closest (gen point, cond triangle) pair realizing c_pos.
struct PosWitness {
  double distance = 0.0;
  int point = 0;     // flat grid index on gen
  std::size_t triangle = 0;
  Point3 on_cond;    // closest point on that triangle
};

/// Minimum over gen's grid points of the distance to triangulated cond.
double c_pos(const FaceGrid& gen, const FaceGrid& cond);
/// Same, with cond's cached hierarchy; ties go to the lowest point index.
PosWitness c_pos_witness(const std::vector<Point3>& gen_points, const FaceQuery& cond);

using EdgeSamples = std::array<Point3, kGridRes>;

/// (1/(N_e-1)) sum (|e_{i+1}-e_i| - |e'_{i+1}-e'_i|)^2
double c_len(const BoundaryEdge& e, const BoundaryEdge& e2);
/// (1/(N_e-1)) sum (1 - u_i . u'_i) over unit segment directions. Throws
/// Error "degenerate-segment" on a zero-length segment.
double c_angle(const BoundaryEdge& e, const BoundaryEdge& e2);

/// Gradients with respect to the samples of e (e2 fixed).
EdgeSamples c_len_grad(const BoundaryEdge& e, const BoundaryEdge& e2);
EdgeSamples c_angle_grad(const BoundaryEdge& e, const BoundaryEdge& e2);

/// e2, reversed when that brings its endpoints closer to e's.
BoundaryEdge align_edge(const BoundaryEdge& e, const BoundaryEdge& e2);

/// Edge pairs of a face match: gen edge k against cond edge partner[k],
/// already aligned.
struct MatchedEdges {
  std::array<int, 4> partner{0, 1, 2, 3};
  std::array<bool, 4> reversed{false, false, false, false};
};

MatchedEdges match_edges(const FaceGrid& gen, const FaceGrid& cond);
MatchedEdges matched_edges_from(const Assignment& edges, const FaceGrid& gen, const FaceGrid& cond);
/// The cond edge paired with gen edge k, in its aligned direction.
BoundaryEdge partner_edge(const FaceGrid& cond, const MatchedEdges& m, int k);

/// Sum over the four matched pairs of lambda_len c_len + lambda_angle c_angle.
double c_shape(const FaceGrid& gen, const FaceGrid& cond, const MatchedEdges& m, double lambda_len,
               double lambda_angle);

}  // namespace geoknit
