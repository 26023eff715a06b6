#include <cmath>
#include <random>

#include "doctest.h"
#include "geoknit/brep/sew.hpp"
#include "geoknit/error.hpp"
#include "oracles.hpp"

using namespace geoknit;

namespace {

bool throws_code(const std::function<void()>& f, const std::string& code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("decode_face") {
  SUBCASE("planar unit cube sits on the mid-plane") {
    const FaceGrid g = decode_face({{0, 0, 0}, {1, 1, 1}}, FaceKind::planar);
    REQUIRE(g.points.size() == 1024u);
    for (const auto& p : g.points) CHECK(p.z == 0.5);
    CHECK(g.at(0, 0) == Point3{0, 0, 0.5});
    CHECK(g.at(31, 31) == Point3{1, 1, 0.5});
  }
  SUBCASE("degenerate box") {
    CHECK(throws_code([] { decode_face({{0, 0, 0}, {2, 1, 1e-13}}, FaceKind::planar); }, "degenerate-box"));
    CHECK(throws_code([] { decode_face({{0, 0, 0}, {-1, 1, 1}}, FaceKind::planar); }, "degenerate-box"));
  }
  SUBCASE("half cylinder stays inside its box") {
    const BoundingBox box{{-1, -1, -1}, {1, 1, 1}};
    const FaceGrid g = decode_face(box, FaceKind::half_cylinder);
    for (const auto& p : g.points) CHECK(box.contains(p, 1e-9));
  }
  SUBCASE("half cylinder apex normal is perpendicular to the axis") {
    const FaceGrid g = decode_face({{0, 0, 0}, {1, 2, 4}}, FaceKind::half_cylinder);
    // Axis along z (longest), so every normal has no z component.
    for (int v : {0, 10, 31}) {
      const Point3 n = face_normal_at(g, {15, v});
      CHECK(std::abs(n.z) < 1e-6);
      CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // At the apex the surface bulges toward +x, the max side of the thinnest axis.
    const Point3 apex = face_normal_at(g, {kGridRes / 2, 16});
    CHECK(std::abs(apex.x) > 0.99);
  }
  SUBCASE("planar box round trip") {
    const BoundingBox in{{0.5, -1, 2}, {3, 1, 2.25}};
    const FaceGrid g = decode_face(in, FaceKind::planar);
    const BoundingBox out = bounding_box_of(g.points.data(), g.points.size());
    CHECK(out.min_corner.x == in.min_corner.x);
    CHECK(out.max_corner.y == in.max_corner.y);
    CHECK(in.contains(out, 1e-9));
    CHECK(in.contains(face_box(g), 1e-9));
  }
}

TEST_CASE("face normals") {
  const FaceGrid up = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1);
  FaceGrid down = up;
  down.orientation = -1;
  for (int i = 0; i < kGridPoints; i += 37) {
    CHECK(face_normal_at(up, GridIndex::from_flat(i)) == Point3{0, 0, 1});
    CHECK(face_normal_at(down, GridIndex::from_flat(i)) == Point3{0, 0, -1});
  }
  FaceGrid flat = up;
  for (auto& p : flat.points) p = {0, 0, 0};
  CHECK(throws_code([&] { face_normal_at(flat, {3, 3}); }, "degenerate-normal"));
}

TEST_CASE("face box padding") {
  const FaceGrid g = oracle::square({0, 0, 2}, {1, 0, 0}, {0, 1, 0});
  const BoundingBox b = face_box(g);
  CHECK(b.dims().z == doctest::Approx(kFaceBoxMinThickness));
  CHECK(b.dims().x == 1.0);
}

TEST_CASE("boundary edges walk the border counter-clockwise") {
  const FaceGrid g = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const auto e = boundary_edges(g);
  for (int k = 0; k < 4; ++k) CHECK(e[static_cast<std::size_t>(k)].samples.back() == e[static_cast<std::size_t>((k + 1) % 4)].samples.front());
  CHECK(e[0].samples.front() == Point3{0, 0, 0});
  CHECK(e[1].samples.front() == Point3{1, 0, 0});
}

TEST_CASE("triangulate") {
  const FaceGrid unit = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const TriangleSoup s = triangulate(unit);
  CHECK(s.size() == 1922u);
  double area = 0.0;
  for (const auto& t : s.triangles) area += t.area();
  CHECK(area == doctest::Approx(1.0).epsilon(1e-9));
  // Triangles follow the face normal.
  for (const auto& t : s.triangles) CHECK(cross(t.b - t.a, t.c - t.a).z > 0.0);

  FaceGrid collapsed = unit;
  for (int u = 0; u < kGridRes; ++u) collapsed.at(u, 1) = collapsed.at(u, 0);
  CHECK(triangulate(collapsed).size() < 1922u);

  const FaceGrid cyl = decode_face({{-1, -1, -1}, {1, 1, 1}}, FaceKind::half_cylinder);
  CHECK(triangulate(cyl).size() == 1922u);
}

TEST_CASE("point to mesh distance") {
  const TriangleSoup one{{Triangle{{-1, -1, 0}, {2, -1, 0}, {-1, 2, 0}}}};
  CHECK(point_to_mesh_distance({-1, -1, 0}, one) == 0.0);
  CHECK(point_to_mesh_distance({0, 0, 1}, one) == 1.0);
  CHECK(throws_code([] { point_to_mesh_distance({0, 0, 0}, TriangleSoup{}); }, "empty-mesh"));
  CHECK(throws_code([] { TriangleBvh(TriangleSoup{}).closest({0, 0, 0}); }, "empty-mesh"));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  TriangleSoup soup;
  for (int i = 0; i < 50; ++i) {
    const Point3 a{u(rng), u(rng), u(rng)};
    soup.triangles.push_back({a, a + 0.4 * Point3{u(rng), u(rng), u(rng)}, a + 0.4 * Point3{u(rng), u(rng), u(rng)}});
  }
  const TriangleBvh bvh(soup);
  for (int k = 0; k < 100; ++k) {
    const Point3 p{u(rng), u(rng), u(rng)};
    const auto want = oracle::closest_on_soup(p, soup);
    CHECK(point_to_mesh_distance(p, soup) == doctest::Approx(std::sqrt(want.sq)).epsilon(1e-12));
    const ClosestHit lin = closest_triangle_linear(p, soup);
    const ClosestHit h = bvh.closest(p);
    CHECK(h.triangle == lin.triangle);
    CHECK(h.sq_dist == lin.sq_dist);
    // 1-Lipschitz.
    const Point3 q = p + 0.1 * Point3{u(rng), u(rng), u(rng)};
    CHECK(std::abs(point_to_mesh_distance(p, soup) - point_to_mesh_distance(q, soup)) <= distance(p, q) + 1e-12);
  }
}

TEST_CASE("bvh on a face matches the linear scan, ties included") {
  const FaceGrid g = decode_face({{0, 0, 0}, {2, 1, 3}}, FaceKind::half_cylinder);
  const FaceQuery q(g);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1, 3);
  for (int k = 0; k < 300; ++k) {
    const Point3 p = k < 50 ? g.points[static_cast<std::size_t>(k * 20)] : Point3{u(rng), u(rng), u(rng)};
    const ClosestHit a = q.bvh().closest(p), b = closest_triangle_linear(p, q.mesh());
    CHECK(a.triangle == b.triangle);
    CHECK(a.sq_dist == b.sq_dist);
  }
  ClosestHit hit;
  CHECK_FALSE(q.bvh().closest_within({100, 100, 100}, 1.0, hit));
}

TEST_CASE("project_to_face") {
  const FaceGrid g = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const auto on = project_to_face(g.points[77], g);
  CHECK(on.point == g.points[77]);
  CHECK(on.index.flat() == 77);
  const auto above = project_to_face({0.3, 0.3, 2}, g);
  CHECK(above.point.x == doctest::Approx(0.3));
  CHECK(above.point.y == doctest::Approx(0.3));
  CHECK(above.point.z == 0.0);
  CHECK(above.index == GridIndex{9, 9});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 2);
  const FaceGrid cyl = decode_face({{0, 0, 0}, {1, 2, 3}}, FaceKind::half_cylinder);
  const TriangleSoup mesh = triangulate(cyl);
  for (int k = 0; k < 50; ++k) {
    const Point3 p{u(rng), u(rng), u(rng)};
    const auto pr = project_to_face(p, cyl);
    CHECK(pr.distance == doctest::Approx(point_to_mesh_distance(p, mesh)).epsilon(1e-12));
    CHECK(distance(pr.point, p) == doctest::Approx(pr.distance).epsilon(1e-12));
  }
}

TEST_CASE("model validation") {
  PartModel m = oracle::box_part({0, 0, 0}, {1, 1, 1});
  CHECK_NOTHROW(validate(m));
  m.contact_indices = {2, 1};
  CHECK(throws_code([&] { validate(m); }, "invalid-model"));
  m.contact_indices = {6};
  CHECK(throws_code([&] { validate(m); }, "invalid-model"));
  m.contact_indices = {1, 2};
  m.faces[0].box = {{5, 5, 5}, {6, 6, 6}};
  CHECK(throws_code([&] { validate(m); }, "invalid-model"));
}

TEST_CASE("welding and watertightness") {
  const PartModel cube = oracle::box_part({0, 0, 0}, {1, 1, 1});
  const TriangleSoup soup = triangulate(cube);
  CHECK(is_watertight(soup));
  CHECK(open_edge_count(weld(soup)) == 0u);
  CHECK_FALSE(is_watertight(triangulate(oracle::box_part({0, 0, 0}, {1, 1, 1}, true))));
  CHECK(point_inside(soup, {0.5, 0.5, 0.5}));
  CHECK_FALSE(point_inside(soup, {1.5, 0.5, 0.5}));
  CHECK(count_ray_crossings(soup, {0.3, 0.4, 0.45}, {1, 0.01, 0.02}) == 1);
}

TEST_CASE("orient_faces points normals outward") {
  PartModel cube = oracle::box_part({0, 0, 0}, {2, 1, 1});
  PartModel flipped = cube;
  flipped.faces[1].grid.orientation = -1;
  flipped.faces[4].grid.orientation = -1;
  orient_faces(flipped);
  CHECK(flipped == cube);
  orient_faces(cube);
  CHECK(cube == oracle::box_part({0, 0, 0}, {2, 1, 1}));
}

TEST_CASE("sew_faces closes small corner gaps") {
  PartModel cube = oracle::box_part({0, 0, 0}, {1, 1, 1});
  // Nudge the top face off its neighbours.
  for (auto& p : cube.faces[5].grid.points) p += Point3{0.03, -0.02, 0.05};
  cube.faces[5].box = face_box(cube.faces[5].grid);
  CHECK_FALSE(is_watertight(triangulate(cube)));
  const PartModel sewn = sew_faces(cube);
  CHECK(is_watertight(triangulate(sewn)));
  // Far-apart faces are left alone.
  PartModel apart = oracle::box_part({0, 0, 0}, {1, 1, 1});
  for (auto& p : apart.faces[5].grid.points) p += Point3{0, 0, 1};
  apart.faces[5].box = face_box(apart.faces[5].grid);
  CHECK(sew_faces(apart).faces[5] == apart.faces[5]);
}
