#pragma once

#include <vector>

#include "geoknit/assign/hungarian.hpp"
#include "geoknit/brep/mesh.hpp"

namespace geoknit {

/// cost(i, j) = mean over the grid points of gen[i] of their distance to the
/// triangulated cond[j].
CostMatrix face_match_costs(const std::vector<FaceGrid>& gen, const std::vector<const FaceQuery*>& cond);
Assignment face_match(const std::vector<FaceGrid>& gen, const std::vector<FaceGrid>& cond);
Assignment face_match(const std::vector<FaceGrid>& gen, const std::vector<const FaceQuery*>& cond);

/// cost(i, j) = symmetric Chamfer distance between boundary edge i of gen and
/// boundary edge j of cond.
CostMatrix edge_match_costs(const FaceGrid& gen, const FaceGrid& cond);
Assignment edge_match(const FaceGrid& gen, const FaceGrid& cond);

}  // namespace geoknit
