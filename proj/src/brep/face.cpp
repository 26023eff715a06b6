#include "geoknit/brep/face.hpp"
#include "geoknit/brep/boxset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoknit/error.hpp"

namespace geoknit {

bool BoundingBox::valid() const {
  return is_finite(min_corner) && is_finite(max_corner) && min_corner.x <= max_corner.x &&
         min_corner.y <= max_corner.y && min_corner.z <= max_corner.z;
}

bool BoundingBox::contains(Point3 p, double tol) const {
  for (int a = 0; a < 3; ++a)
    if (p[a] < min_corner[a] - tol || p[a] > max_corner[a] + tol) return false;
  return true;
}

bool BoundingBox::contains(const BoundingBox& other, double tol) const {
  return contains(other.min_corner, tol) && contains(other.max_corner, tol);
}

BoundingBox BoundingBox::inflated(double margin) const {
  const Point3 m{margin, margin, margin};
  return {min_corner - m, max_corner + m};
}

bool BoundingBox::overlaps(const BoundingBox& other) const {
  for (int a = 0; a < 3; ++a)
    if (max_corner[a] < other.min_corner[a] || other.max_corner[a] < min_corner[a]) return false;
  return true;
}

double BoundingBox::sq_distance(Point3 p) const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (p[a] < min_corner[a]) d = min_corner[a] - p[a];
    else if (p[a] > max_corner[a]) d = p[a] - max_corner[a];
    s += d * d;
  }
  return s;
}

std::array<double, 6> BoundingBox::encode() const {
  return {min_corner.x, min_corner.y, min_corner.z, max_corner.x, max_corner.y, max_corner.z};
}

BoundingBox BoundingBox::decode(const std::array<double, 6>& v) { return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}}; }

BoundingBox BoundingBox::from_unordered(const std::array<double, 6>& v) {
  BoundingBox b;
  for (int a = 0; a < 3; ++a) {
    b.min_corner[a] = std::min(v[a], v[a + 3]);
    b.max_corner[a] = std::max(v[a], v[a + 3]);
  }
  return b;
}

BoundingBox bounding_box_of(const Point3* points, std::size_t n) {
  BoundingBox b{points[0], points[0]};
  for (std::size_t i = 1; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      b.min_corner[a] = std::min(b.min_corner[a], points[i][a]);
      b.max_corner[a] = std::max(b.max_corner[a], points[i][a]);
    }
  }
  return b;
}

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
  BoundingBox r;
  for (int k = 0; k < 3; ++k) {
    r.min_corner[k] = std::min(a.min_corner[k], b.min_corner[k]);
    r.max_corner[k] = std::max(a.max_corner[k], b.max_corner[k]);
  }
  return r;
}

std::string to_string(FaceKind kind) { return kind == FaceKind::planar ? "planar" : "half_cylinder"; }

FaceKind face_kind_from_string(const std::string& s) {
  if (s == "planar") return FaceKind::planar;
  if (s == "half_cylinder") return FaceKind::half_cylinder;
  throw Error("invalid-model", "unknown face kind '" + s + "'");
}

void validate(const PartModel& model) {
  for (std::size_t i = 0; i < model.contact_indices.size(); ++i) {
    const int c = model.contact_indices[i];
    if (c < 0 || static_cast<std::size_t>(c) >= model.faces.size())
      throw Error("invalid-model", "contact index out of range");
    if (i > 0 && model.contact_indices[i - 1] >= c)
      throw Error("invalid-model", "contact indices must be sorted and unique");
  }
  for (const auto& f : model.faces) {
    if (f.grid.points.size() != static_cast<std::size_t>(kGridPoints))
      throw Error("invalid-model", "face grid must hold 1024 points");
    if (f.grid.orientation != 1 && f.grid.orientation != -1)
      throw Error("invalid-model", "orientation must be +1 or -1");
    for (const auto& p : f.grid.points)
      if (!is_finite(p) || !f.box.contains(p, 1e-6)) throw Error("invalid-model", "box does not enclose its grid");
  }
}

namespace {

// Axes ordered by decreasing extent; ties keep x < y < z.
std::array<int, 3> axes_by_extent(Point3 d) {
  std::array<int, 3> ax{0, 1, 2};
  std::stable_sort(ax.begin(), ax.end(), [&](int a, int b) { return d[a] > d[b]; });
  return ax;
}

double lerp_exact(double a, double b, int i) {
  if (i == 0) return a;
  if (i == kGridRes - 1) return b;
  const double s = static_cast<double>(i) / (kGridRes - 1);
  return (1.0 - s) * a + s * b;
}

void reverse_u(FaceGrid& g) {
  for (int v = 0; v < kGridRes; ++v)
    std::reverse(g.points.begin() + v * kGridRes, g.points.begin() + (v + 1) * kGridRes);
}

Point3 raw_normal(const FaceGrid& face, GridIndex idx) {
  const int u0 = std::max(idx.u - 1, 0), u1 = std::min(idx.u + 1, kGridRes - 1);
  const int v0 = std::max(idx.v - 1, 0), v1 = std::min(idx.v + 1, kGridRes - 1);
  const Point3 tu = face.at(u1, idx.v) - face.at(u0, idx.v);
  const Point3 tv = face.at(idx.u, v1) - face.at(idx.u, v0);
  return cross(tu, tv);
}

}  // namespace

FaceGrid decode_face(const BoundingBox& box, FaceKind kind, int orientation) {
  if (!box.valid()) throw Error("degenerate-box", "box corners are not ordered or not finite");
  const Point3 d = box.dims();
  if (d.x < kDegeneracy || d.y < kDegeneracy || d.z < kDegeneracy)
    throw Error("degenerate-box", "box extent below 1e-12");
  if (orientation != 1 && orientation != -1) throw Error("invalid-model", "orientation must be +1 or -1");

  const auto ax = axes_by_extent(d);
  const int a0 = ax[0], a1 = ax[1], a2 = ax[2];
  FaceGrid g;
  g.kind = kind;
  g.orientation = orientation;
  g.points.resize(kGridPoints);

  Point3 want;  // direction the parametric normal must take at the centre sample
  if (kind == FaceKind::planar) {
    const double mid = 0.5 * (box.min_corner[a2] + box.max_corner[a2]);
    for (int v = 0; v < kGridRes; ++v)
      for (int u = 0; u < kGridRes; ++u) {
        Point3& p = g.at(u, v);
        p[a0] = lerp_exact(box.min_corner[a0], box.max_corner[a0], u);
        p[a1] = lerp_exact(box.min_corner[a1], box.max_corner[a1], v);
        p[a2] = mid;
      }
    want[a2] = 1.0;
  } else {
    // Axis along a0 (v), chord along a1, bulge toward max of a2 (u sweeps the arc).
    const double c1 = 0.5 * (box.min_corner[a1] + box.max_corner[a1]);
    const double r1 = 0.5 * d[a1];
    const double r2 = d[a2];
    for (int v = 0; v < kGridRes; ++v)
      for (int u = 0; u < kGridRes; ++u) {
        const double theta = std::numbers::pi * static_cast<double>(u) / (kGridRes - 1);
        Point3& p = g.at(u, v);
        p[a0] = lerp_exact(box.min_corner[a0], box.max_corner[a0], v);
        p[a1] = std::clamp(c1 + r1 * std::cos(theta), box.min_corner[a1], box.max_corner[a1]);
        p[a2] = std::clamp(box.min_corner[a2] + r2 * std::sin(theta), box.min_corner[a2], box.max_corner[a2]);
      }
    want[a2] = 1.0;  // at the apex the outward direction is +a2
  }
  // Orientation +1 means "toward +a2" (planar) or "away from the axis" (half cylinder).
  if (dot(raw_normal(g, {kGridRes / 2, kGridRes / 2}), want) < 0.0) reverse_u(g);
  return g;
}

Point3 face_normal_at(const FaceGrid& face, GridIndex index) {
  if (index.u < 0 || index.u >= kGridRes || index.v < 0 || index.v >= kGridRes)
    throw Error("invalid-index", "grid index out of range");
  const Point3 n = raw_normal(face, index);
  const double len = norm(n);
  if (!(len >= kDegeneracy)) throw Error("degenerate-normal", "tangents are parallel or vanish");
  return (static_cast<double>(face.orientation) / len) * n;
}

std::vector<Point3> face_normals(const FaceGrid& face) {
  std::vector<Point3> out(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) out[static_cast<std::size_t>(i)] = face_normal_at(face, GridIndex::from_flat(i));
  return out;
}

BoundingBox face_box(const FaceGrid& face) {
  BoundingBox b = bounding_box_of(face.points.data(), face.points.size());
  for (int a = 0; a < 3; ++a) {
    const double ext = b.max_corner[a] - b.min_corner[a];
    if (ext < kFaceBoxMinThickness) {
      const double pad = 0.5 * (kFaceBoxMinThickness - ext);
      b.min_corner[a] -= pad;
      b.max_corner[a] += pad;
    }
  }
  return b;
}

BoundaryEdge boundary_edge(const FaceGrid& face, int k) {
  BoundaryEdge e;
  const int last = kGridRes - 1;
  for (int i = 0; i < kGridRes; ++i) {
    switch (k) {
      case 0: e.samples[static_cast<std::size_t>(i)] = face.at(i, 0); break;
      case 1: e.samples[static_cast<std::size_t>(i)] = face.at(last, i); break;
      case 2: e.samples[static_cast<std::size_t>(i)] = face.at(last - i, last); break;
      case 3: e.samples[static_cast<std::size_t>(i)] = face.at(0, last - i); break;
      default: throw Error("invalid-index", "boundary edge index must be 0..3");
    }
  }
  return e;
}

std::array<BoundaryEdge, 4> boundary_edges(const FaceGrid& face) {
  return {boundary_edge(face, 0), boundary_edge(face, 1), boundary_edge(face, 2), boundary_edge(face, 3)};
}

FaceGrid bilinear_face(Point3 c00, Point3 c10, Point3 c01, Point3 c11, int orientation) {
  FaceGrid g;
  g.kind = FaceKind::planar;
  g.orientation = orientation;
  g.points.resize(kGridPoints);
  for (int v = 0; v < kGridRes; ++v) {
    for (int u = 0; u < kGridRes; ++u) {
      Point3 bottom, top;
      for (int a = 0; a < 3; ++a) {
        bottom[a] = lerp_exact(c00[a], c10[a], u);
        top[a] = lerp_exact(c01[a], c11[a], u);
      }
      Point3& p = g.at(u, v);
      for (int a = 0; a < 3; ++a) p[a] = lerp_exact(bottom[a], top[a], v);
    }
  }
  return g;
}

FaceEntry make_face_entry(FaceGrid grid) {
  FaceEntry e;
  e.box = face_box(grid);
  e.grid = std::move(grid);
  return e;
}


Point3 BoxSet::center(std::size_t i) const {
  const double* r = row(i);
  return {0.5 * (r[0] + r[3]), 0.5 * (r[1] + r[4]), 0.5 * (r[2] + r[5])};
}

Point3 BoxSet::dims(std::size_t i) const {
  const double* r = row(i);
  return {r[3] - r[0], r[4] - r[1], r[5] - r[2]};
}

BoundingBox BoxSet::box(std::size_t i) const {
  const double* r = row(i);
  return BoundingBox::from_unordered({r[0], r[1], r[2], r[3], r[4], r[5]});
}

void BoxSet::set_box(std::size_t i, const BoundingBox& b) {
  const auto e = b.encode();
  double* r = row(i);
  for (std::size_t k = 0; k < 6; ++k) r[k] = e[k];
}

BoxSet box_set_of(const std::vector<BoundingBox>& boxes) {
  BoxSet x(boxes.size(), 6);
  for (std::size_t i = 0; i < boxes.size(); ++i) x.set_box(i, boxes[i]);
  return x;
}

BoxSet contact_rows(const BoxSet& x) {
  std::size_t n = 0;
  for (auto m : x.contact_mask) n += m ? 1 : 0;
  BoxSet out(n, x.dim);
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.count; ++i) {
    if (!x.contact_mask[i]) continue;
    std::copy(x.row(i), x.row(i) + x.dim, out.row(k));
    out.contact_mask[k++] = 1;
  }
  return out;
}

}  // namespace geoknit
