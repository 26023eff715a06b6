#include "geoknit/guidance/predictor.hpp"

#include <cmath>
#include <limits>

#include "geoknit/assign/matching.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

int ring_index(int k, int i) { return ((kGridRes - 1) * k + i) % kRingSamples; }

namespace {

constexpr int kLast = kGridRes - 1;

// Displacement of ring-adjacent boundary samples, addressed by grid position.
Point3 ring_at(const FaceOptimVariables& v, int u, int w) {
  if (w == 0) return v.ring[static_cast<std::size_t>(ring_index(0, u))];
  if (u == kLast) return v.ring[static_cast<std::size_t>(ring_index(1, w))];
  if (w == kLast) return v.ring[static_cast<std::size_t>(ring_index(2, kLast - u))];
  return v.ring[static_cast<std::size_t>(ring_index(3, kLast - w))];
}

}  // namespace

FaceGrid apply_variables(const FaceGrid& base, const FaceOptimVariables& vars) {
  FaceGrid out = base;
  const Point3 d00 = ring_at(vars, 0, 0), d10 = ring_at(vars, kLast, 0);
  const Point3 d01 = ring_at(vars, 0, kLast), d11 = ring_at(vars, kLast, kLast);
  for (int w = 0; w < kGridRes; ++w) {
    const double sv = static_cast<double>(w) / kLast;
    const Point3 left = ring_at(vars, 0, w), right = ring_at(vars, kLast, w);
    for (int u = 0; u < kGridRes; ++u) {
      const double su = static_cast<double>(u) / kLast;
      Point3 d;
      if (u == 0 || u == kLast || w == 0 || w == kLast) {
        d = ring_at(vars, u, w);
      } else {
        const Point3 bottom = ring_at(vars, u, 0), top = ring_at(vars, u, kLast);
        d = (1.0 - sv) * bottom + sv * top + (1.0 - su) * left + su * right -
            ((1.0 - su) * (1.0 - sv) * d00 + su * (1.0 - sv) * d10 + (1.0 - su) * sv * d01 + su * sv * d11);
      }
      out.at(u, w) = base.at(u, w) + vars.translation + d;
    }
  }
  return out;
}

namespace {

double shape_cost(const FaceGrid& face, const FaceQuery& cond, const MatchedEdges& edges, const PairWeights& w) {
  if (w.shape == 0.0) return 0.0;
  return w.shape * c_shape(face, cond.face(), edges, w.len, w.angle);
}

double objective_of(const FaceGrid& face, const FaceQuery& cond, const MatchedEdges& edges, const PairWeights& w,
                    PosWitness* witness) {
  double c = 0.0;
  if (w.pos != 0.0) {
    const PosWitness pw = c_pos_witness(face.points, cond);
    if (witness) *witness = pw;
    c += w.pos * pw.distance;
  }
  try {
    c += shape_cost(face, cond, edges, w);
  } catch (const Error& e) {
    if (e.code() != "degenerate-segment") throw;
    return std::numeric_limits<double>::infinity();
  }
  return c;
}

}  // namespace

double pair_objective(const FaceGrid& base, const FaceOptimVariables& vars, const FaceQuery& cond,
                      const MatchedEdges& edges, const PairWeights& w) {
  return objective_of(apply_variables(base, vars), cond, edges, w, nullptr);
}

PairResult optimize_pair(const FaceGrid& gen, const FaceQuery& cond, const MatchedEdges& edges, const PairWeights& w,
                         int steps, double learning_rate, int max_halvings) {
  PairResult r;
  r.face = gen;
  PosWitness witness;
  double cost = objective_of(gen, cond, edges, w, &witness);
  r.cost_before = r.cost_after = cost;
  r.trace.push_back(cost);
  if ((w.pos == 0.0 && w.shape == 0.0) || !(cost > 0.0)) return r;

  double lr = learning_rate;
  for (int it = 0; it < steps; ++it) {
    // Translation gradient from the active point-triangle pair.
    Point3 g_t;
    if (w.pos != 0.0 && witness.distance > 0.0) {
      const Point3 p = r.face.points[static_cast<std::size_t>(witness.point)];
      g_t = (w.pos / witness.distance) * (p - witness.on_cond);
    }
    // Ring gradient from the matched edges.
    std::array<Point3, kRingSamples> g_ring{};
    if (w.shape != 0.0) {
      for (int k = 0; k < 4; ++k) {
        const BoundaryEdge e = boundary_edge(r.face, k);
        const BoundaryEdge e2 = partner_edge(cond.face(), edges, k);
        EdgeSamples g{};
        if (w.len != 0.0) {
          const EdgeSamples gl = c_len_grad(e, e2);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += w.len * gl[i];
        }
        if (w.angle != 0.0) {
          const EdgeSamples ga = c_angle_grad(e, e2);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += w.angle * ga[i];
        }
        for (int i = 0; i < kGridRes; ++i)
          g_ring[static_cast<std::size_t>(ring_index(k, i))] += w.shape * g[static_cast<std::size_t>(i)];
      }
    }

    bool accepted = false;
    for (int h = 0; h <= max_halvings && !accepted; ++h) {
      FaceOptimVariables trial = r.vars;
      trial.translation -= lr * g_t;
      for (std::size_t i = 0; i < trial.ring.size(); ++i) trial.ring[i] -= lr * g_ring[i];
      FaceGrid face = apply_variables(gen, trial);
      PosWitness tw;
      const double c = objective_of(face, cond, edges, w, &tw);
      if (c < cost) {
        r.vars = trial;
        r.face = std::move(face);
        witness = tw;
        cost = c;
        accepted = true;
      } else {
        lr *= 0.5;
      }
    }
    if (!accepted) break;
    ++r.accepted_steps;
    r.trace.push_back(cost);
    if (!(cost > 0.0)) break;
  }
  r.cost_after = cost;
  return r;
}

std::vector<const FaceQuery*> ConditionGeometry::query_ptrs() const {
  std::vector<const FaceQuery*> out;
  for (const auto& q : queries) out.push_back(q.get());
  return out;
}

ConditionGeometry prepare_condition_geometry(const PartModel& cond) {
  if (cond.contact_indices.empty()) throw Error("no-condition-contacts", "condition has no designated contact faces");
  ConditionGeometry g;
  g.contact_faces = cond.contact_indices;
  for (int i : cond.contact_indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= cond.faces.size()) throw Error("invalid-model", "contact index out of range");
    g.queries.push_back(std::make_unique<FaceQuery>(cond.faces[static_cast<std::size_t>(i)].grid));
  }
  return g;
}

PairWeights guidance_weights(const GuidanceConfig& config, int t, int total_steps) {
  const double tau = static_cast<double>(t) / static_cast<double>(total_steps);
  PairWeights w;
  w.pos = tau > config.theta_pos ? 1.0 : 0.0;
  w.shape = tau > config.theta_shape ? 1.0 : 0.0;
  w.len = config.lambda_len;
  w.angle = config.lambda_angle;
  return w;
}

BoundingBox decodable_box(const BoundingBox& raw) {
  BoundingBox b = raw;
  for (int a = 0; a < 3; ++a) {
    if (b.min_corner[a] > b.max_corner[a]) std::swap(b.min_corner[a], b.max_corner[a]);
    const double ext = b.max_corner[a] - b.min_corner[a];
    if (ext < kFaceBoxMinThickness) {
      const double pad = 0.5 * (kFaceBoxMinThickness - ext);
      b.min_corner[a] -= pad;
      b.max_corner[a] += pad;
    }
  }
  return b;
}

GuidingSample predict_guiding_sample(const BoxSet& x, const ConditionGeometry& cond, int t, int total_steps,
                                     const GuidanceConfig& config) {
  if (cond.queries.empty()) throw Error("no-condition-contacts", "condition has no designated contact faces");
  if (x.dim != 6) throw Error("shape-mismatch", "guidance needs 6-value box rows");
  GuidingSample gs;
  gs.boxes = x;

  std::vector<std::size_t> slots;
  std::vector<FaceGrid> faces;
  for (std::size_t i = 0; i < x.count; ++i) {
    if (!x.contact_mask[i]) continue;
    slots.push_back(i);
    faces.push_back(decode_face(decodable_box(x.box(i)), FaceKind::planar));
  }
  if (slots.empty()) return gs;

  const Assignment match = face_match(faces, cond.query_ptrs());
  const PairWeights w = guidance_weights(config, t, total_steps);
  std::vector<std::size_t> rows;
  for (auto [gi, ci] : match.pairs) {
    const auto g = static_cast<std::size_t>(gi);
    const FaceQuery& cq = *cond.queries[static_cast<std::size_t>(ci)];
    const MatchedEdges edges = match_edges(faces[g], cq.face());
    const PairResult pr =
        optimize_pair(faces[g], cq, edges, w, config.optimizer_steps, config.learning_rate, config.max_halvings);
    if (pr.accepted_steps > 0) gs.boxes.set_box(slots[g], face_box(pr.face));
    gs.optimized_faces.push_back(pr.face);
    gs.pairs.emplace_back(static_cast<int>(slots[g]), cond.contact_faces[static_cast<std::size_t>(ci)]);
    gs.cost_before.push_back(pr.cost_before);
    gs.cost_after.push_back(pr.cost_after);
    rows.push_back(slots[g]);
  }
  gs.guide = BoxSet(rows.size(), 6);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::copy(gs.boxes.row(rows[k]), gs.boxes.row(rows[k]) + 6, gs.guide.row(k));
    gs.guide.contact_mask[k] = 1;
  }
  return gs;
}

GuidingSample predict_guiding_sample(const BoxSet& x, const PartModel& cond, int t, int total_steps,
                                     const GuidanceConfig& config) {
  return predict_guiding_sample(x, prepare_condition_geometry(cond), t, total_steps, config);
}

}  // namespace geoknit
