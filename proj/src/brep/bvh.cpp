#include <algorithm>
#include <limits>

#include "geoknit/brep/mesh.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

namespace {
constexpr std::size_t kLeafSize = 8;
}

TriangleBvh::TriangleBvh(const TriangleSoup& soup) {
  const std::size_t n = soup.size();
  if (n == 0) return;
  std::vector<Point3> centroids(n);
  std::vector<BoundingBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Triangle& t = soup.triangles[i];
    centroids[i] = (1.0 / 3.0) * (t.a + t.b + t.c);
    boxes[i] = bounding_box_of(&t.a, 3);
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(idx, centroids, boxes, 0, n);
  order_ = idx;
  std::vector<Triangle> reordered(n);
  for (std::size_t i = 0; i < n; ++i) reordered[i] = soup.triangles[order_[i]];
  packed_ = PackedTriangles(reordered);
}

int TriangleBvh::build(std::vector<std::size_t>& idx, const std::vector<Point3>& centroids,
                       const std::vector<BoundingBox>& boxes, std::size_t begin, std::size_t end) {
  Node node;
  node.box = boxes[idx[begin]];
  BoundingBox cbox{centroids[idx[begin]], centroids[idx[begin]]};
  for (std::size_t i = begin; i < end; ++i) {
    node.box = box_union(node.box, boxes[idx[i]]);
    cbox = box_union(cbox, BoundingBox{centroids[idx[i]], centroids[idx[i]]});
  }
  node.begin = begin;
  node.end = end;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  const Point3 ext = cbox.dims();
  int axis = 0;
  if (ext.y > ext[axis]) axis = 1;
  if (ext.z > ext[axis]) axis = 2;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(mid),
                   idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                     return a < b;
                   });
  const int left = build(idx, centroids, boxes, begin, mid);
  const int right = build(idx, centroids, boxes, mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void TriangleBvh::search(Point3 p, ClosestHit& best, bool& found) const {
  const double q[3] = {p.x, p.y, p.z};
  const auto tris = packed_.arrays();
  double dists[kLeafSize];
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (node.box.sq_distance(p) > best.sq_dist) continue;
    if (node.left < 0) {
      simd::kernels().triangle_sq_dists(tris, node.begin, node.end, q, dists);
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const double d = dists[i - node.begin];
        const std::size_t src = order_[i];
        if (d < best.sq_dist || (d == best.sq_dist && found && src < best.triangle) || (d == best.sq_dist && !found)) {
          best = {d, src};
          found = true;
        }
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = l.box.sq_distance(p), dr = r.box.sq_distance(p);
    // Push the farther child first so the nearer one is searched first.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
}

ClosestHit TriangleBvh::closest(Point3 p) const {
  if (empty()) throw Error("empty-mesh", "closest-point query on an empty mesh");
  ClosestHit best{std::numeric_limits<double>::infinity(), 0};
  bool found = false;
  search(p, best, found);
  return best;
}

bool TriangleBvh::closest_within(Point3 p, double bound_sq, ClosestHit& hit) const {
  if (empty()) throw Error("empty-mesh", "closest-point query on an empty mesh");
  ClosestHit best{bound_sq, 0};
  bool found = false;
  search(p, best, found);
  if (found) hit = best;
  return found;
}

}  // namespace geoknit
