#include "geoknit/guidance/costs.hpp"

#include <algorithm>
#include <limits>

#include "geoknit/assign/matching.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

double d_geo(const BoxSet& candidate, const BoxSet& guide) {
  if (candidate.count == 0 || guide.count == 0) throw Error("empty-set", "d_geo needs non-empty box sets");
  double sum = 0.0;
  for (std::size_t j = 0; j < guide.count; ++j) {
    const Point3 cj = guide.center(j), dj = guide.dims(j);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidate.count; ++i)
      best = std::min(best, distance(candidate.center(i), cj) + distance(candidate.dims(i), dj));
    sum += best;
  }
  return sum / static_cast<double>(guide.count);
}

PosWitness c_pos_witness(const std::vector<Point3>& gen_points, const FaceQuery& cond) {
  if (gen_points.empty()) throw Error("empty-set", "c_pos of an empty face");
  double best = std::numeric_limits<double>::infinity();
  PosWitness w;
  for (std::size_t i = 0; i < gen_points.size(); ++i) {
    ClosestHit hit;
    if (!cond.bvh().closest_within(gen_points[i], best, hit)) continue;
    if (!(hit.sq_dist < best)) continue;
    best = hit.sq_dist;
    w.point = static_cast<int>(i);
    w.triangle = hit.triangle;
  }
  w.distance = std::sqrt(best);
  w.on_cond = closest_point_on_triangle(gen_points[static_cast<std::size_t>(w.point)], cond.mesh().triangles[w.triangle]);
  return w;
}

double c_pos(const FaceGrid& gen, const FaceGrid& cond) { return c_pos_witness(gen.points, FaceQuery(cond)).distance; }

namespace {
constexpr double kSegments = kGridRes - 1;
}

double c_len(const BoundaryEdge& e, const BoundaryEdge& e2) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < kGridRes; ++i) {
    const double d = distance(e.samples[i + 1], e.samples[i]) - distance(e2.samples[i + 1], e2.samples[i]);
    s += d * d;
  }
  return s / kSegments;
}

double c_angle(const BoundaryEdge& e, const BoundaryEdge& e2) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < kGridRes; ++i) {
    const Point3 a = e.samples[i + 1] - e.samples[i], b = e2.samples[i + 1] - e2.samples[i];
    const double la = norm(a), lb = norm(b);
    if (la < kDegeneracy || lb < kDegeneracy) throw Error("degenerate-segment", "zero-length edge segment");
    s += 1.0 - dot(a, b) / (la * lb);
  }
  return s / kSegments;
}

EdgeSamples c_len_grad(const BoundaryEdge& e, const BoundaryEdge& e2) {
  EdgeSamples g{};
  for (std::size_t i = 0; i + 1 < kGridRes; ++i) {
    const Point3 a = e.samples[i + 1] - e.samples[i];
    const double la = norm(a);
    if (la < kDegeneracy) continue;
    const double r = la - distance(e2.samples[i + 1], e2.samples[i]);
    const Point3 step = (2.0 * r / (kSegments * la)) * a;
    g[i + 1] += step;
    g[i] -= step;
  }
  return g;
}

EdgeSamples c_angle_grad(const BoundaryEdge& e, const BoundaryEdge& e2) {
  EdgeSamples g{};
  for (std::size_t i = 0; i + 1 < kGridRes; ++i) {
    const Point3 a = e.samples[i + 1] - e.samples[i], b = e2.samples[i + 1] - e2.samples[i];
    const double la = norm(a), lb = norm(b);
    if (la < kDegeneracy || lb < kDegeneracy) throw Error("degenerate-segment", "zero-length edge segment");
    const Point3 u = (1.0 / la) * a, w = (1.0 / lb) * b;
    // d(1 - u.w)/da = -(w - (u.w) u) / |a|
    const Point3 step = (-1.0 / (kSegments * la)) * (w - dot(u, w) * u);
    g[i + 1] += step;
    g[i] -= step;
  }
  return g;
}

BoundaryEdge align_edge(const BoundaryEdge& e, const BoundaryEdge& e2) {
  const std::size_t last = kGridRes - 1;
  const double same = distance(e.samples[0], e2.samples[0]) + distance(e.samples[last], e2.samples[last]);
  const double flip = distance(e.samples[0], e2.samples[last]) + distance(e.samples[last], e2.samples[0]);
  if (!(flip < same)) return e2;
  BoundaryEdge r = e2;
  std::reverse(r.samples.begin(), r.samples.end());
  return r;
}

MatchedEdges matched_edges_from(const Assignment& edges, const FaceGrid& gen, const FaceGrid& cond) {
  MatchedEdges m;
  const auto eg = boundary_edges(gen);
  const auto ec = boundary_edges(cond);
  for (auto [r, c] : edges.pairs) {
    m.partner[static_cast<std::size_t>(r)] = c;
    const BoundaryEdge& e2 = ec[static_cast<std::size_t>(c)];
    m.reversed[static_cast<std::size_t>(r)] =
        align_edge(eg[static_cast<std::size_t>(r)], e2).samples[0] != e2.samples[0];
  }
  return m;
}

MatchedEdges match_edges(const FaceGrid& gen, const FaceGrid& cond) {
  return matched_edges_from(edge_match(gen, cond), gen, cond);
}

BoundaryEdge partner_edge(const FaceGrid& cond, const MatchedEdges& m, int k) {
  BoundaryEdge e = boundary_edge(cond, m.partner[static_cast<std::size_t>(k)]);
  if (m.reversed[static_cast<std::size_t>(k)]) std::reverse(e.samples.begin(), e.samples.end());
  return e;
}

double c_shape(const FaceGrid& gen, const FaceGrid& cond, const MatchedEdges& m, double lambda_len,
               double lambda_angle) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    const BoundaryEdge e = boundary_edge(gen, k);
    const BoundaryEdge e2 = partner_edge(cond, m, k);
    if (lambda_len != 0.0) s += lambda_len * c_len(e, e2);
    if (lambda_angle != 0.0) s += lambda_angle * c_angle(e, e2);
  }
  return s;
}

}  // namespace geoknit
