#include "geoknit/contact/labeler.hpp"

#include <algorithm>
#include <memory>

#include "geoknit/error.hpp"
#include "geoknit/pipeline/parallel.hpp"

namespace geoknit {

namespace {

// Square of the largest distance that still counts as within delta, with a
// little slack so box rejection never disagrees with the exact test.
double reject_sq(double delta) {
  const double r = delta * (1.0 + 1e-9) + 1e-12;
  return r * r;
}

bool opposed(Point3 n_p, Point3 n_q) { return dot(n_p, n_q) < -kOpposedNormalEps; }

// Witness indices of a's points against b.
std::vector<int> one_side(const FaceQuery& a, const FaceQuery& b, double delta, const BoundingBox& b_box) {
  std::vector<int> out;
  const double bound = reject_sq(delta);
  for (int i = 0; i < kGridPoints; ++i) {
    const GridIndex gi = GridIndex::from_flat(i);
    const Point3 p = a.face().at(gi.u, gi.v);
    if (b_box.sq_distance(p) > bound) continue;
    ClosestHit hit;
    if (!b.bvh().closest_within(p, bound, hit)) continue;
    if (std::sqrt(hit.sq_dist) > delta) continue;
    const Point3 q = closest_point_on_triangle(p, b.mesh().triangles[hit.triangle]);
    if (opposed(a.normal(gi), b.normal(b.nearest_sample(q)))) out.push_back(i);
  }
  return out;
}

}  // namespace

bool point_contact(Point3 p, Point3 n_p, const FaceQuery& face, double delta) {
  const auto proj = face.project(p);
  return proj.distance <= delta && opposed(n_p, face.normal(proj.index));
}

bool point_contact(Point3 p, Point3 n_p, const FaceGrid& face, double delta) {
  return point_contact(p, n_p, FaceQuery(face), delta);
}

FaceContact faces_in_contact(const FaceQuery& a, const FaceQuery& b, double delta) {
  FaceContact fc;
  const BoundingBox box_a = bounding_box_of(a.face().points.data(), a.face().points.size());
  const BoundingBox box_b = bounding_box_of(b.face().points.data(), b.face().points.size());
  const double slack = delta * (1.0 + 1e-9) + 1e-12;
  if (!box_a.overlaps(box_b.inflated(slack))) return fc;
  fc.witnesses = one_side(a, b, delta, box_b);
  if (fc.witnesses.empty()) {
    fc.witnesses = one_side(b, a, delta, box_a);
    fc.witnesses_on_a = false;
  }
  fc.in_contact = !fc.witnesses.empty();
  return fc;
}

FaceContact faces_in_contact(const FaceGrid& a, const FaceGrid& b, double delta) {
  return faces_in_contact(FaceQuery(a), FaceQuery(b), delta);
}

ContactReport find_contacts(const PartModel& a, const PartModel& b, double delta) {
  if (a.faces.empty() || b.faces.empty()) throw Error("empty-model", "label_contacts needs faces on both models");
  if (!(delta > 0.0)) throw Error("invalid-argument", "delta must be positive");

  std::vector<std::unique_ptr<FaceQuery>> qa(a.size()), qb(b.size());
  parallel_for(a.size() + b.size(), [&](std::size_t i) {
    if (i < a.size())
      qa[i] = std::make_unique<FaceQuery>(a.faces[i].grid);
    else
      qb[i - a.size()] = std::make_unique<FaceQuery>(b.faces[i - a.size()].grid);
  });

  std::vector<std::pair<int, int>> candidates;
  const double slack = delta * (1.0 + 1e-9) + 1e-12;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (a.faces[i].box.overlaps(b.faces[j].box.inflated(slack)))
        candidates.emplace_back(static_cast<int>(i), static_cast<int>(j));

  std::vector<FaceContact> results(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t k) {
    results[k] = faces_in_contact(*qa[static_cast<std::size_t>(candidates[k].first)],
                                  *qb[static_cast<std::size_t>(candidates[k].second)], delta);
  });

  ContactReport report;
  report.delta = delta;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (results[k].in_contact)
      report.pairs.push_back({candidates[k].first, candidates[k].second, results[k].witnesses_on_a,
                              std::move(results[k].witnesses)});
  return report;
}

std::vector<int> contacted_faces(const ContactReport& report, bool side_a) {
  std::vector<int> out;
  for (const auto& p : report.pairs) out.push_back(side_a ? p.a : p.b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ContactReport label_contacts(PartModel& a, PartModel& b, double delta) {
  ContactReport r = find_contacts(a, b, delta);
  a.contact_indices = contacted_faces(r, true);
  b.contact_indices = contacted_faces(r, false);
  return r;
}

}  // namespace geoknit
