#include "geoknit/brep/mesh.hpp"
#include "geoknit/brep/pointset.hpp"

#include "geoknit/error.hpp"

namespace geoknit {

TriangleSoup triangulate(const FaceGrid& face) {
  TriangleSoup soup;
  soup.triangles.reserve(2 * (kGridRes - 1) * (kGridRes - 1));
  auto emit = [&](Point3 a, Point3 b, Point3 c) {
    Triangle t{a, b, c};
    if (t.area() > kMinTriangleArea) soup.triangles.push_back(t);
  };
  for (int v = 0; v + 1 < kGridRes; ++v) {
    for (int u = 0; u + 1 < kGridRes; ++u) {
      const Point3 p00 = face.at(u, v), p10 = face.at(u + 1, v);
      const Point3 p01 = face.at(u, v + 1), p11 = face.at(u + 1, v + 1);
      if (squared_norm(p11 - p00) <= squared_norm(p01 - p10)) {
        emit(p00, p10, p11);
        emit(p00, p11, p01);
      } else {
        emit(p00, p10, p01);
        emit(p10, p11, p01);
      }
    }
  }
  return soup;
}

TriangleSoup triangulate(const PartModel& model) {
  TriangleSoup all;
  for (const auto& f : model.faces) {
    auto s = triangulate(f.grid);
    all.triangles.insert(all.triangles.end(), s.triangles.begin(), s.triangles.end());
  }
  return all;
}

Point3 closest_point_on_triangle(Point3 p, const Triangle& t) {
  const Point3 ab = t.b - t.a, ac = t.c - t.a, bc = t.c - t.b;
  const Point3 n = cross(ab, ac);
  const Point3 ap = p - t.a, bp = p - t.b, cp = p - t.c;
  const bool inside = dot(n, cross(ab, ap)) >= 0.0 && dot(n, cross(bc, bp)) >= 0.0 && dot(n, cross(-ac, cp)) >= 0.0;
  if (inside) return p - (dot(ap, n) / dot(n, n)) * n;

  auto seg = [](Point3 v, Point3 origin, Point3 e) {
    double s = dot(v, e) / dot(e, e);
    s = s > 0.0 ? s : 0.0;
    s = s < 1.0 ? s : 1.0;
    return origin + s * e;
  };
  const Point3 q_ab = seg(ap, t.a, ab), q_ac = seg(ap, t.a, ac), q_bc = seg(bp, t.b, bc);
  const double d_ab = squared_norm(p - q_ab), d_ac = squared_norm(p - q_ac), d_bc = squared_norm(p - q_bc);
  if (d_ab < d_ac && d_ab < d_bc) return q_ab;
  return d_ac < d_bc ? q_ac : q_bc;
}

namespace {
constexpr std::size_t kFields = 25;
}

PackedTriangles::PackedTriangles(std::span<const Triangle> tris) : count_(tris.size()), data_(kFields * tris.size()) {
  auto col = [&](std::size_t f) { return data_.data() + f * count_; };
  for (std::size_t i = 0; i < count_; ++i) {
    const Triangle& t = tris[i];
    const Point3 ab = t.b - t.a, ac = t.c - t.a, bc = t.c - t.b, n = cross(ab, ac);
    const Point3 vals[7] = {t.a, t.b, t.c, ab, ac, bc, n};
    for (std::size_t k = 0; k < 7; ++k) {
      col(3 * k)[i] = vals[k].x;
      col(3 * k + 1)[i] = vals[k].y;
      col(3 * k + 2)[i] = vals[k].z;
    }
    col(21)[i] = 1.0 / dot(ab, ab);
    col(22)[i] = 1.0 / dot(ac, ac);
    col(23)[i] = 1.0 / dot(bc, bc);
    col(24)[i] = 1.0 / dot(n, n);
  }
}

simd::TriangleArrays PackedTriangles::arrays() const {
  auto col = [&](std::size_t f) -> const double* { return data_.data() + f * count_; };
  return {col(0),  col(1),  col(2),  col(3),  col(4),  col(5),  col(6),  col(7),  col(8),
          col(9),  col(10), col(11), col(12), col(13), col(14), col(15), col(16), col(17),
          col(18), col(19), col(20), col(21), col(22), col(23), col(24)};
}

ClosestHit closest_triangle_linear(Point3 p, const TriangleSoup& mesh) {
  if (mesh.empty()) throw Error("empty-mesh", "point_to_mesh_distance on an empty mesh");
  const PackedTriangles packed(mesh.triangles);
  const double q[3] = {p.x, p.y, p.z};
  const auto r = simd::kernels().triangle_min_sq_dist(packed.arrays(), 0, packed.size(), q);
  return {r.sq_dist, r.index};
}

double point_to_mesh_distance(Point3 p, const TriangleSoup& mesh) {
  return std::sqrt(closest_triangle_linear(p, mesh).sq_dist);
}

FaceQuery::FaceQuery(const FaceGrid& face)
    : face_(face), mesh_(triangulate(face)), bvh_(mesh_), normals_(face_normals(face)) {
  xs_.resize(kGridPoints);
  ys_.resize(kGridPoints);
  zs_.resize(kGridPoints);
  for (std::size_t i = 0; i < static_cast<std::size_t>(kGridPoints); ++i) {
    xs_[i] = face.points[i].x;
    ys_[i] = face.points[i].y;
    zs_[i] = face.points[i].z;
  }
}

double FaceQuery::distance(Point3 p) const { return std::sqrt(bvh_.closest(p).sq_dist); }

GridIndex FaceQuery::nearest_sample(Point3 p) const {
  const double q[3] = {p.x, p.y, p.z};
  const auto r = simd::kernels().point_min_sq_dist({xs_.data(), ys_.data(), zs_.data()}, xs_.size(), q);
  return GridIndex::from_flat(static_cast<int>(r.index));
}

FaceQuery::Projection FaceQuery::project(Point3 p) const {
  const ClosestHit hit = bvh_.closest(p);
  Projection out;
  out.point = closest_point_on_triangle(p, mesh_.triangles[hit.triangle]);
  out.index = nearest_sample(out.point);
  out.distance = std::sqrt(hit.sq_dist);
  return out;
}

FaceQuery::Projection project_to_face(Point3 p, const FaceGrid& face) { return FaceQuery(face).project(p); }

double mean_nearest_distance(std::span<const Point3> a, std::span<const Point3> b) {
  if (a.empty() || b.empty()) throw Error("empty-set", "nearest-distance query on an empty point set");
  std::vector<double> xs(b.size()), ys(b.size()), zs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    xs[i] = b[i].x;
    ys[i] = b[i].y;
    zs[i] = b[i].z;
  }
  const simd::PointArrays arr{xs.data(), ys.data(), zs.data()};
  const auto& k = simd::kernels();
  double sum = 0.0;
  for (const Point3& p : a) {
    const double q[3] = {p.x, p.y, p.z};
    sum += std::sqrt(k.point_min_sq_dist(arr, b.size(), q).sq_dist);
  }
  return sum / static_cast<double>(a.size());
}

double chamfer_distance(std::span<const Point3> a, std::span<const Point3> b) {
  return 0.5 * (mean_nearest_distance(a, b) + mean_nearest_distance(b, a));
}

}  // namespace geoknit
