#include "geoknit/assign/matching.hpp"

#include <memory>

#include "geoknit/brep/pointset.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

CostMatrix face_match_costs(const std::vector<FaceGrid>& gen, const std::vector<const FaceQuery*>& cond) {
  if (gen.empty() || cond.empty()) throw Error("empty-set", "face_match needs faces on both sides");
  CostMatrix c(gen.size(), cond.size());
  for (std::size_t i = 0; i < gen.size(); ++i)
    for (std::size_t j = 0; j < cond.size(); ++j) {
      double sum = 0.0;
      for (const Point3& p : gen[i].points) sum += cond[j]->distance(p);
      c(i, j) = sum / static_cast<double>(gen[i].points.size());
    }
  return c;
}

Assignment face_match(const std::vector<FaceGrid>& gen, const std::vector<const FaceQuery*>& cond) {
  return hungarian(face_match_costs(gen, cond));
}

Assignment face_match(const std::vector<FaceGrid>& gen, const std::vector<FaceGrid>& cond) {
  std::vector<std::unique_ptr<FaceQuery>> owned;
  std::vector<const FaceQuery*> ptrs;
  for (const auto& f : cond) {
    owned.push_back(std::make_unique<FaceQuery>(f));
    ptrs.push_back(owned.back().get());
  }
  return face_match(gen, ptrs);
}

CostMatrix edge_match_costs(const FaceGrid& gen, const FaceGrid& cond) {
  const auto eg = boundary_edges(gen);
  const auto ec = boundary_edges(cond);
  CostMatrix c(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) c(i, j) = chamfer_distance(eg[i].samples, ec[j].samples);
  return c;
}

Assignment edge_match(const FaceGrid& gen, const FaceGrid& cond) { return hungarian(edge_match_costs(gen, cond)); }

}  // namespace geoknit
