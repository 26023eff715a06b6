#include "geoknit/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>

#include "geoknit/brep/pointset.hpp"
#include "geoknit/brep/sew.hpp"
#include "geoknit/contact/labeler.hpp"
#include "geoknit/diffusion/sampler.hpp"
#include "geoknit/error.hpp"
#include "json.hpp"

namespace geoknit {

std::vector<Point3> sample_surface(const TriangleSoup& soup, std::size_t n, std::uint64_t seed) {
  if (soup.empty()) throw Error("empty-mesh", "cannot sample an empty surface");
  std::vector<double> cdf(soup.size());
  double total = 0.0;
  for (std::size_t i = 0; i < soup.size(); ++i) {
    total += soup.triangles[i].area();
    cdf[i] = total;
  }
  auto rng = rng_stream(seed, {kStreamSurface});
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = uni(rng) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), soup.size() - 1);
    const Triangle& t = soup.triangles[idx];
    double a = uni(rng), b = uni(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    pts.push_back(t.a + a * (t.b - t.a) + b * (t.c - t.a));
  }
  return pts;
}

double chamfer(std::span<const Point3> a, std::span<const Point3> b) { return chamfer_distance(a, b); }

double chamfer_models(const PartModel& a, const PartModel& b, std::uint64_t seed, std::size_t n) {
  const auto pa = sample_surface(triangulate(a), n, seed);
  const auto pb = sample_surface(triangulate(b), n, seed + 1);
  return chamfer(pa, pb);
}

double face_distance(const FaceGrid& a, const FaceQuery& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point3& p : a.points) {
    ClosestHit hit;
    if (b.bvh().closest_within(p, best, hit) && hit.sq_dist < best) best = hit.sq_dist;
  }
  return std::sqrt(best);
}

double proximity(const PartModel& gen, const PartModel& cond, double delta) {
  if (gen.faces.empty()) throw Error("empty-model", "proximity of an empty generated model");
  if (cond.contact_indices.empty()) throw Error("no-condition-contacts", "condition has no designated contact faces");
  std::vector<std::unique_ptr<FaceQuery>> gq;
  for (const auto& f : gen.faces) gq.push_back(std::make_unique<FaceQuery>(f.grid));
  double sum = 0.0;
  for (int ci : cond.contact_indices) {
    const FaceQuery cq(cond.faces.at(static_cast<std::size_t>(ci)).grid);
    double in_contact = std::numeric_limits<double>::infinity();
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gen.faces.size(); ++g) {
      const double d = face_distance(gen.faces[g].grid, cq);
      nearest = std::min(nearest, d);
      if (d <= delta && faces_in_contact(*gq[g], cq, delta).in_contact) in_contact = std::min(in_contact, d);
    }
    sum += std::isfinite(in_contact) ? in_contact : nearest;
  }
  return sum / static_cast<double>(cond.contact_indices.size());
}

Point3 VoxelGrid::voxel_center(int i, int j, int k) const {
  const Point3 d = bounds.dims();
  const double r = resolution;
  return {bounds.min_corner.x + (i + 0.5) * d.x / r, bounds.min_corner.y + (j + 0.5) * d.y / r,
          bounds.min_corner.z + (k + 0.5) * d.z / r};
}

VoxelGrid voxel_grid_for(const BoundingBox& bounds, int resolution) {
  if (resolution < 1) throw Error("invalid-argument", "voxel resolution must be positive");
  VoxelGrid g;
  const Point3 d = bounds.dims();
  g.bounds = bounds;
  for (int a = 0; a < 3; ++a) {
    const double pad = 0.05 * std::max(d[a], 1e-9);
    g.bounds.min_corner[a] -= pad;
    g.bounds.max_corner[a] += pad;
  }
  g.resolution = resolution;
  return g;
}

std::vector<std::uint8_t> voxelize(const TriangleSoup& soup, const VoxelGrid& grid) {
  const int r = grid.resolution;
  const Point3 d = grid.bounds.dims();
  const double sy = d.y / r, sz = d.z / r;
  // Column rays are nudged off the voxel-centre lattice so they never graze
  // the edges of axis-aligned geometry.
  const double jitter_y = 1.3e-7 * sy, jitter_z = 0.7e-7 * sz;
  std::vector<std::vector<double>> hits(static_cast<std::size_t>(r) * static_cast<std::size_t>(r));
  for (const Triangle& t : soup.triangles) {
    const double ymin = std::min({t.a.y, t.b.y, t.c.y}), ymax = std::max({t.a.y, t.b.y, t.c.y});
    const double zmin = std::min({t.a.z, t.b.z, t.c.z}), zmax = std::max({t.a.z, t.b.z, t.c.z});
    const int j0 = std::max(0, static_cast<int>(std::floor((ymin - grid.bounds.min_corner.y) / sy - 0.5)));
    const int j1 = std::min(r - 1, static_cast<int>(std::ceil((ymax - grid.bounds.min_corner.y) / sy - 0.5)));
    const int k0 = std::max(0, static_cast<int>(std::floor((zmin - grid.bounds.min_corner.z) / sz - 0.5)));
    const int k1 = std::min(r - 1, static_cast<int>(std::ceil((zmax - grid.bounds.min_corner.z) / sz - 0.5)));
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) {
        const double y = grid.bounds.min_corner.y + (j + 0.5) * sy + jitter_y;
        const double z = grid.bounds.min_corner.z + (k + 0.5) * sz + jitter_z;
        // Barycentric coordinates of (y, z) in the projected triangle.
        const double e1y = t.b.y - t.a.y, e1z = t.b.z - t.a.z, e2y = t.c.y - t.a.y, e2z = t.c.z - t.a.z;
        const double det = e1y * e2z - e1z * e2y;
        if (det == 0.0) continue;
        const double py = y - t.a.y, pz = z - t.a.z;
        const double u = (py * e2z - pz * e2y) / det;
        const double v = (e1y * pz - e1z * py) / det;
        if (u < 0.0 || v < 0.0 || u + v > 1.0) continue;
        const double x = t.a.x + u * (t.b.x - t.a.x) + v * (t.c.x - t.a.x);
        hits[static_cast<std::size_t>(j) * static_cast<std::size_t>(r) + static_cast<std::size_t>(k)].push_back(x);
      }
  }
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(r) * r * r, 0);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k) {
      auto& xs = hits[static_cast<std::size_t>(j) * static_cast<std::size_t>(r) + static_cast<std::size_t>(k)];
      std::sort(xs.begin(), xs.end());
      std::size_t crossed = 0;
      for (int i = 0; i < r; ++i) {
        const double x = grid.voxel_center(i, j, k).x;
        while (crossed < xs.size() && xs[crossed] < x) ++crossed;
        inside[(static_cast<std::size_t>(i) * r + static_cast<std::size_t>(j)) * r + static_cast<std::size_t>(k)] =
            static_cast<std::uint8_t>(crossed % 2);
      }
    }
  return inside;
}

double intersection_volume(const PartModel& gen, const PartModel& cond, int resolution) {
  const TriangleSoup sg = triangulate(gen), sc = triangulate(cond);
  if (!is_watertight(sg) || !is_watertight(sc)) throw Error("not-watertight", "intersection volume needs closed parts");
  BoundingBox all = bounding_box_of(&sg.triangles.front().a, 1);
  for (const auto* s : {&sg, &sc})
    for (const auto& t : s->triangles) all = box_union(all, bounding_box_of(&t.a, 3));
  const VoxelGrid grid = voxel_grid_for(all, resolution);
  const auto vg = voxelize(sg, grid);
  const auto vc = voxelize(sc, grid);
  std::size_t in_gen = 0, in_both = 0;
  for (std::size_t i = 0; i < vg.size(); ++i) {
    in_gen += vg[i];
    in_both += vg[i] & vc[i];
  }
  if (in_gen == 0) throw Error("zero-volume", "generated part encloses no voxel");
  return 100.0 * static_cast<double>(in_both) / static_cast<double>(in_gen);
}

namespace {

bool grid_ok(const FaceGrid& g) {
  if (g.points.size() != static_cast<std::size_t>(kGridPoints)) return false;
  for (const auto& p : g.points)
    if (!is_finite(p)) return false;
  const int cells = kGridRes - 1;
  std::vector<Point3> n(static_cast<std::size_t>(cells * cells));
  for (int v = 0; v < cells; ++v)
    for (int u = 0; u < cells; ++u) {
      const Point3 c = cross(g.at(u + 1, v + 1) - g.at(u, v), g.at(u, v + 1) - g.at(u + 1, v));
      if (norm(c) < kDegeneracy) return false;  // collapsed cell
      n[static_cast<std::size_t>(v * cells + u)] = c;
    }
  for (int v = 0; v < cells; ++v)
    for (int u = 0; u < cells; ++u) {
      const Point3& c = n[static_cast<std::size_t>(v * cells + u)];
      if (u + 1 < cells && dot(c, n[static_cast<std::size_t>(v * cells + u + 1)]) <= 0.0) return false;
      if (v + 1 < cells && dot(c, n[static_cast<std::size_t>((v + 1) * cells + u)]) <= 0.0) return false;
    }
  return true;
}

}  // namespace

bool is_valid_part(const PartModel& model) {
  if (model.faces.empty()) return false;
  for (const auto& f : model.faces) {
    const Point3 d = f.box.dims();
    if (!(std::min({d.x, d.y, d.z}) > 1e-6)) return false;
    if (!grid_ok(f.grid)) return false;
  }
  return is_watertight(triangulate(model), kSolidWeldTolerance);
}

double valid_ratio(std::span<const PartModel> models) {
  if (models.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& m : models) ok += is_valid_part(m) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(models.size());
}

SampleMetrics evaluate_sample(const std::string& id, const PartModel& gen, const PartModel& cond,
                              const PartModel& target, double delta, std::uint64_t seed) {
  SampleMetrics m;
  m.id = id;
  m.cd = chamfer_models(gen, target, seed);
  m.pr = proximity(gen, cond, delta);
  m.valid = is_valid_part(gen);
  try {
    m.iv = intersection_volume(gen, cond);
  } catch (const Error& e) {
    if (e.code() != "not-watertight" && e.code() != "zero-volume") throw;
  }
  return m;
}

EvalReport aggregate(std::vector<SampleMetrics> samples) {
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  EvalReport r;
  std::size_t valid = 0;
  for (const auto& s : samples) {
    r.cd += s.cd;
    r.pr += s.pr;
    if (s.iv) {
      r.iv += *s.iv;
      ++r.iv_count;
    }
    valid += s.valid ? 1 : 0;
  }
  if (!samples.empty()) {
    r.cd /= static_cast<double>(samples.size());
    r.pr /= static_cast<double>(samples.size());
    r.vr = static_cast<double>(valid) / static_cast<double>(samples.size());
  }
  if (r.iv_count > 0) r.iv /= static_cast<double>(r.iv_count);
  r.samples = std::move(samples);
  return r;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::json j;
  j["frame"] = "normalized";
  j["units"] = {{"cd", "model units"}, {"pr", "model units"}, {"iv", "percent"}, {"vr", "fraction"}};
  j["vr_note"] = "watertightness proxy, not a CAD-kernel build check";
  j["cd"] = report.cd;
  j["pr"] = report.pr;
  j["iv"] = report.iv;
  j["iv_count"] = report.iv_count;
  j["vr"] = report.vr;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : report.samples) {
    nlohmann::json row{{"id", s.id}, {"cd", s.cd}, {"pr", s.pr}, {"valid", s.valid}};
    row["iv"] = s.iv ? nlohmann::json(*s.iv) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "sample_id,cd,pr,iv,vr_flag\n";
  out << std::setprecision(17);
  for (const auto& s : report.samples) {
    out << s.id << ',' << s.cd << ',' << s.pr << ',';
    if (s.iv) out << *s.iv;
    out << ',' << (s.valid ? 1 : 0) << '\n';
  }
}

}  // namespace geoknit
