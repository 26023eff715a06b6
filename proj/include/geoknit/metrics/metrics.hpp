#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geoknit/brep/mesh.hpp"

namespace geoknit {

inline constexpr std::size_t kChamferSamples = 2000;
inline constexpr int kVoxelResolution = 64;

/// n points uniform over the soup's area (triangle picked by area, then
/// uniform barycentric). Throws Error "empty-mesh".
std::vector<Point3> sample_surface(const TriangleSoup& soup, std::size_t n, std::uint64_t seed);

/// Symmetric Chamfer distance: half the sum of both mean nearest-neighbour
/// distances. Throws Error "empty-set".
double chamfer(std::span<const Point3> a, std::span<const Point3> b);
/// Chamfer between surface samples of the two models.
double chamfer_models(const PartModel& a, const PartModel& b, std::uint64_t seed, std::size_t n = kChamferSamples);

/// Minimum over face a's grid points of the distance to triangulated b.
double face_distance(const FaceGrid& a, const FaceQuery& b);

/// Mean over cond's designated contact faces of the distance to the gen faces
/// in contact with it, or to the nearest gen face when none is. Throws Error
/// "empty-model" / "no-condition-contacts".
double proximity(const PartModel& gen, const PartModel& cond, double delta = 0.1);

/// 100 |inside both| / |inside gen| over a res^3 voxel grid covering both
/// models' bounds inflated by 5%. Throws Error "not-watertight" or
/// "zero-volume".
double intersection_volume(const PartModel& gen, const PartModel& cond, int resolution = kVoxelResolution);

/// Volume fraction estimate helpers, exposed for tests: voxel-centre inside
/// flags of one soup over a grid.
struct VoxelGrid {
  BoundingBox bounds;
  int resolution = kVoxelResolution;
  Point3 voxel_center(int i, int j, int k) const;
};
VoxelGrid voxel_grid_for(const BoundingBox& bounds, int resolution);
std::vector<std::uint8_t> voxelize(const TriangleSoup& soup, const VoxelGrid& grid);

/// Validity proxy: boxes non-degenerate (min dim > 1e-6), grids finite with
/// no collapsed or folded cells, welded triangulation closed.
bool is_valid_part(const PartModel& model);
double valid_ratio(std::span<const PartModel> models);

struct SampleMetrics {
  std::string id;
  double cd = 0.0;
  double pr = 0.0;
  std::optional<double> iv;  // only when both parts are watertight
  bool valid = false;
};

struct EvalReport {
  double cd = 0.0;
  double pr = 0.0;
  double iv = 0.0;  // mean over samples with iv
  double vr = 0.0;
  std::size_t iv_count = 0;
  std::vector<SampleMetrics> samples;  // sorted by id
};

/// gen against its reference condition (PR, IV) and target (CD).
SampleMetrics evaluate_sample(const std::string& id, const PartModel& gen, const PartModel& cond,
                              const PartModel& target, double delta, std::uint64_t seed);
EvalReport aggregate(std::vector<SampleMetrics> samples);

void write_report_json(std::ostream& out, const EvalReport& report);
/// Columns sample_id,cd,pr,iv,vr_flag; iv left empty when undefined.
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace geoknit
