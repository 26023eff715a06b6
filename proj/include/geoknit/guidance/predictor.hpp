#pragma once

#include <array>
#include <memory>
#include <vector>

#include "geoknit/brep/boxset.hpp"
#include "geoknit/brep/mesh.hpp"
#include "geoknit/guidance/config.hpp"
#include "geoknit/guidance/costs.hpp"

namespace geoknit {

inline constexpr int kRingSamples = 4 * (kGridRes - 1);  // boundary samples, corners once

/// Per-face optimization state: a rigid translation plus a displacement for
/// every boundary sample; interior samples follow a Coons patch of the
/// boundary displacements.
struct FaceOptimVariables {
  Point3 translation;
  std::array<Point3, kRingSamples> ring{};
};

/// Ring index of sample i (0..31) along boundary edge k.
int ring_index(int k, int i);
/// base + translation + Coons interpolation of the ring displacements.
FaceGrid apply_variables(const FaceGrid& base, const FaceOptimVariables& vars);

struct PairWeights {
  double pos = 1.0;
  double shape = 1.0;
  double len = 1.0;
  double angle = 0.0;
};

struct PairResult {
  FaceOptimVariables vars;
  FaceGrid face;
  double cost_before = 0.0;
  double cost_after = 0.0;
  int accepted_steps = 0;
  std::vector<double> trace;  // objective after each accepted step, starting value first
};

/// C = w.pos C_pos + w.shape C_shape for one matched pair at given variables.
double pair_objective(const FaceGrid& base, const FaceOptimVariables& vars, const FaceQuery& cond,
                      const MatchedEdges& edges, const PairWeights& w);

/// Gradient descent on C: C_pos's active pair moves the translation, C_shape
/// moves the ring displacements. A step that does not lower C is halved up
/// to max_halvings times; the step length carries over between iterations
/// and the loop stops when no halving helps.
PairResult optimize_pair(const FaceGrid& gen, const FaceQuery& cond, const MatchedEdges& edges, const PairWeights& w,
                         int steps, double learning_rate, int max_halvings);

struct GuidingSample {
  std::vector<FaceGrid> optimized_faces;  // one per matched pair
  std::vector<std::pair<int, int>> pairs;  // (x row, cond face index)
  BoxSet boxes;  // x with matched rows replaced by the optimized faces' boxes
  BoxSet guide;  // just the matched rows of `boxes`
  std::vector<double> cost_before;
  std::vector<double> cost_after;
};

/// Condition-side data reused across guided steps.
struct ConditionGeometry {
  std::vector<int> contact_faces;
  std::vector<std::unique_ptr<FaceQuery>> queries;
  std::vector<const FaceQuery*> query_ptrs() const;
};

/// Throws Error "no-condition-contacts".
ConditionGeometry prepare_condition_geometry(const PartModel& cond);

/// lambda_pos(t), lambda_shape(t) as step functions of t / T.
PairWeights guidance_weights(const GuidanceConfig& config, int t, int total_steps);

/// Decode the contact-slot rows as planar faces, match them to the
/// condition's contact faces, optimize each matched pair and rebuild boxes.
GuidingSample predict_guiding_sample(const BoxSet& x, const ConditionGeometry& cond, int t, int total_steps,
                                     const GuidanceConfig& config);
GuidingSample predict_guiding_sample(const BoxSet& x, const PartModel& cond, int t, int total_steps,
                                     const GuidanceConfig& config);

/// A face box from a possibly disordered, possibly flat diffusion row: corners
/// sorted and every extent padded to the face-box minimum.
BoundingBox decodable_box(const BoundingBox& raw);

}  // namespace geoknit
