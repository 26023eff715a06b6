#include "geoknit/brep/sew.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "geoknit/error.hpp"

namespace geoknit {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;  // root is always the lowest index
  }
};

std::uint64_t cell_key(std::int64_t x, std::int64_t y, std::int64_t z) {
  const auto h = [](std::int64_t v) { return static_cast<std::uint64_t>(v) * 0x9E3779B97F4A7C15ull; };
  return h(x) ^ (h(y) >> 21) ^ (h(z) << 13) ^ (static_cast<std::uint64_t>(z) * 0xC2B2AE3D27D4EB4Full);
}

// Ray/triangle hit (Moller-Trumbore), s > 0.
bool ray_hits(Point3 o, Point3 dir, const Triangle& t) {
  const Point3 e1 = t.b - t.a, e2 = t.c - t.a;
  const Point3 pv = cross(dir, e2);
  const double det = dot(e1, pv);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Point3 tv = o - t.a;
  const double u = dot(tv, pv) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Point3 qv = cross(tv, e1);
  const double v = dot(dir, qv) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return dot(e2, qv) * inv > 0.0;
}

}  // namespace

WeldedMesh weld(const TriangleSoup& soup, double tol) {
  const std::size_t nv = 3 * soup.size();
  std::vector<Point3> pts(nv);
  for (std::size_t i = 0; i < soup.size(); ++i) {
    pts[3 * i] = soup.triangles[i].a;
    pts[3 * i + 1] = soup.triangles[i].b;
    pts[3 * i + 2] = soup.triangles[i].c;
  }
  UnionFind uf(nv);
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  const double inv = 1.0 / tol;
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < nv; ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor(pts[i].x * inv));
    const auto cy = static_cast<std::int64_t>(std::floor(pts[i].y * inv));
    const auto cz = static_cast<std::int64_t>(std::floor(pts[i].z * inv));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(cell_key(cx + dx, cy + dy, cz + dz));
          if (it == grid.end()) continue;
          for (int j : it->second)
            if (squared_norm(pts[static_cast<std::size_t>(j)] - pts[i]) <= tol2) uf.unite(static_cast<int>(i), j);
        }
    grid[cell_key(cx, cy, cz)].push_back(static_cast<int>(i));
  }

  WeldedMesh out;
  std::vector<int> remap(nv, -1);
  for (std::size_t i = 0; i < nv; ++i) {
    const auto root = static_cast<std::size_t>(uf.find(static_cast<int>(i)));
    if (remap[root] < 0) {
      remap[root] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(pts[root]);
    }
  }
  for (std::size_t t = 0; t < soup.size(); ++t) {
    std::array<int, 3> tri{};
    for (std::size_t k = 0; k < 3; ++k) tri[k] = remap[static_cast<std::size_t>(uf.find(static_cast<int>(3 * t + k)))];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    out.triangles.push_back(tri);
  }
  return out;
}

std::size_t open_edge_count(const WeldedMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * mesh.triangles.size());
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  std::sort(edges.begin(), edges.end());
  std::size_t open = 0;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) ++open;
    i = j;
  }
  return open;
}

bool is_watertight(const TriangleSoup& soup, double tol) {
  if (soup.empty()) return false;
  const WeldedMesh m = weld(soup, tol);
  return !m.triangles.empty() && open_edge_count(m) == 0;
}

int count_ray_crossings(const TriangleSoup& soup, Point3 origin, Point3 dir) {
  int hits = 0;
  for (const auto& t : soup.triangles) hits += ray_hits(origin, dir, t) ? 1 : 0;
  return hits;
}

bool point_inside(const TriangleSoup& soup, Point3 p) {
  static const Point3 dirs[3] = {{0.8017, 0.3419, 0.4905}, {-0.3137, 0.8461, -0.4309}, {0.2791, -0.5073, -0.8152}};
  int votes = 0;
  for (const auto& d : dirs) votes += count_ray_crossings(soup, p, d) % 2;
  return votes >= 2;
}

PartModel sew_faces(const PartModel& model, double tol) {
  const std::size_t nf = model.faces.size();
  const int last = kGridRes - 1;
  const GridIndex corner_idx[4] = {{0, 0}, {last, 0}, {0, last}, {last, last}};
  std::vector<Point3> corners(4 * nf);
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t k = 0; k < 4; ++k) corners[4 * f + k] = model.faces[f].grid.at(corner_idx[k].u, corner_idx[k].v);

  UnionFind uf(corners.size());
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if (model.faces[i / 4].grid.kind != FaceKind::planar) continue;
    for (std::size_t j = i + 1; j < corners.size(); ++j)
      if (model.faces[j / 4].grid.kind == FaceKind::planar && squared_norm(corners[i] - corners[j]) <= tol2)
        uf.unite(static_cast<int>(i), static_cast<int>(j));
  }
  std::vector<Point3> sum(corners.size());
  std::vector<int> count(corners.size(), 0);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const auto r = static_cast<std::size_t>(uf.find(static_cast<int>(i)));
    sum[r] += corners[i];
    ++count[r];
  }

  PartModel out;
  out.contact_indices = model.contact_indices;
  out.prompt = model.prompt;
  out.faces.reserve(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const FaceGrid& g = model.faces[f].grid;
    if (g.kind != FaceKind::planar) {
      out.faces.push_back(model.faces[f]);
      continue;
    }
    Point3 c[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto r = static_cast<std::size_t>(uf.find(static_cast<int>(4 * f + k)));
      c[k] = (1.0 / count[r]) * sum[r];
    }
    out.faces.push_back(make_face_entry(bilinear_face(c[0], c[1], c[2], c[3], g.orientation)));
  }
  return out;
}

void orient_faces(PartModel& model) {
  if (model.faces.empty()) return;
  const TriangleSoup soup = triangulate(model);
  const bool closed = is_watertight(soup);
  Point3 centroid;
  std::size_t npts = 0;
  BoundingBox all = model.faces.front().box;
  for (const auto& f : model.faces) {
    for (const auto& p : f.grid.points) centroid += p;
    npts += f.grid.points.size();
    all = box_union(all, f.box);
  }
  centroid = (1.0 / static_cast<double>(npts)) * centroid;
  const double eps = 1e-4 * norm(all.dims());

  for (auto& f : model.faces) {
    FaceGrid g = f.grid;
    g.orientation = 1;
    const GridIndex mid{kGridRes / 2, kGridRes / 2};
    Point3 n;
    try {
      n = face_normal_at(g, mid);
    } catch (const Error&) {
      continue;  // collapsed face, orientation is meaningless
    }
    const Point3 p = g.at(mid.u, mid.v);
    bool flip;
    if (closed)
      flip = point_inside(soup, p + eps * n);
    else
      flip = dot(n, p - centroid) < 0.0;
    f.grid.orientation = flip ? -1 : 1;
  }
}

}  // namespace geoknit
