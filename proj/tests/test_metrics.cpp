#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "geoknit/error.hpp"
#include "geoknit/metrics/metrics.hpp"
#include "oracles.hpp"

using namespace geoknit;

namespace {

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

PartModel scaled(PartModel m, double s) {
  for (auto& f : m.faces) {
    for (auto& p : f.grid.points) p = s * p;
    f.box = face_box(f.grid);
  }
  return m;
}

}  // namespace

TEST_CASE("chamfer") {
  const std::vector<Point3> a{{0, 0, 0}}, b{{3, 4, 0}};
  CHECK(chamfer(a, b) == 5.0);
  CHECK(chamfer(b, b) == 0.0);
  CHECK(error_code([&] { chamfer(a, std::vector<Point3>{}); }) == "empty-set");
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 5; ++k) {
    std::vector<Point3> x(20), y(30);
    for (auto& p : x) p = {u(rng), u(rng), u(rng)};
    for (auto& p : y) p = {u(rng), u(rng), u(rng)};
    CHECK(std::abs(chamfer(x, y) - oracle::chamfer(x, y)) <= 1e-12);
    CHECK(chamfer(x, y) == chamfer(y, x));
    const oracle::Rigid g = oracle::random_rigid(rng);
    std::vector<Point3> gx = x, gy = y;
    for (auto& p : gx) p = g.apply(p);
    for (auto& p : gy) p = g.apply(p);
    CHECK(std::abs(chamfer(gx, gy) - chamfer(x, y)) <= 1e-9);
  }
}

TEST_CASE("surface sampling") {
  const PartModel cube = oracle::box_part({0, 0, 0}, {1, 1, 1});
  const TriangleSoup soup = triangulate(cube);
  const auto s1 = sample_surface(soup, 500, 4);
  CHECK(s1 == sample_surface(soup, 500, 4));
  for (const auto& p : s1) CHECK(point_to_mesh_distance(p, soup) < 1e-9);
  CHECK(chamfer_models(cube, cube, 4) < 0.05);
  CHECK(error_code([] { sample_surface(TriangleSoup{}, 5, 1); }) == "empty-mesh");
}

TEST_CASE("proximity") {
  PartModel cond = oracle::box_part({0, 0, -1}, {1, 1, 0});
  cond.contact_indices = {5};
  PartModel gen = oracle::box_part({0, 0, 0}, {1, 1, 1});
  CHECK(proximity(gen, cond) == 0.0);
  PartModel gap = oracle::box_part({0, 0, 0.07}, {1, 1, 1.07});
  CHECK(proximity(gap, cond) == doctest::Approx(0.07).epsilon(1e-12));
  // No contact: falls back to the nearest face.
  PartModel far = oracle::box_part({0, 0, 0.5}, {1, 1, 1.5});
  CHECK(proximity(far, cond) == doctest::Approx(0.5).epsilon(1e-12));

  cond.contact_indices.clear();
  CHECK(error_code([&] { proximity(gen, cond); }) == "no-condition-contacts");
  cond.contact_indices = {5};
  CHECK(error_code([&] { proximity(PartModel{}, cond); }) == "empty-model");
}

TEST_CASE("intersection volume") {
  const PartModel unit = oracle::box_part({0, 0, 0}, {1, 1, 1});
  CHECK(intersection_volume(unit, oracle::box_part({3, 0, 0}, {4, 1, 1})) == 0.0);
  CHECK(std::abs(intersection_volume(unit, unit) - 100.0) <= 1.0);
  CHECK(std::abs(intersection_volume(oracle::box_part({0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}), unit) - 100.0) <= 1.0);
  CHECK(std::abs(intersection_volume(unit, oracle::box_part({0.5, 0, 0}, {1.5, 1, 1})) - 50.0) <= 2.0);
  CHECK(error_code([&] { intersection_volume(oracle::box_part({0, 0, 0}, {1, 1, 1}, true), unit); }) == "not-watertight");
}

TEST_CASE("voxelize") {
  const PartModel unit = oracle::box_part({0, 0, 0}, {1, 1, 1});
  const VoxelGrid g = voxel_grid_for({{-1, -1, -1}, {2, 2, 2}}, 8);
  const auto flags = voxelize(triangulate(unit), g);
  REQUIRE(flags.size() == 512u);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) {
        const Point3 c = g.voxel_center(i, j, k);
        const bool in = c.x > 0 && c.x < 1 && c.y > 0 && c.y < 1 && c.z > 0 && c.z < 1;
        CHECK(static_cast<bool>(flags[static_cast<std::size_t>((i * 8 + j) * 8 + k)]) == in);
      }
}

TEST_CASE("validity proxy") {
  const PartModel cube = oracle::box_part({0, 0, 0}, {1, 1, 1});
  CHECK(is_valid_part(cube));
  CHECK(is_valid_part(scaled(cube, 10.0)));
  CHECK_FALSE(is_valid_part(oracle::box_part({0, 0, 0}, {1, 1, 1}, true)));
  PartModel flat = cube;
  for (auto& p : flat.faces[0].grid.points) p = flat.faces[0].grid.points[0];
  flat.faces[0].box = {flat.faces[0].grid.points[0], flat.faces[0].grid.points[0]};
  CHECK_FALSE(is_valid_part(flat));
  PartModel nan = cube;
  nan.faces[2].grid.points[40].x = std::nan("");
  CHECK_FALSE(is_valid_part(nan));

  const std::vector<PartModel> set{cube, oracle::box_part({0, 0, 0}, {1, 1, 1}, true), flat, scaled(cube, 0.5)};
  CHECK(valid_ratio(set) == 0.5);
  CHECK(valid_ratio(std::vector<PartModel>{}) == 0.0);
}

TEST_CASE("reports") {
  SampleMetrics a{"b", 1.5, 0.25, std::nullopt, false};
  SampleMetrics b{"a", 0.5, 0.75, 30.0, true};
  const EvalReport r = aggregate({a, b});
  CHECK(r.samples[0].id == "a");
  CHECK(r.cd == 1.0);
  CHECK(r.pr == 0.5);
  CHECK(r.iv == 30.0);
  CHECK(r.iv_count == 1u);
  CHECK(r.vr == 0.5);
  std::ostringstream csv;
  write_report_csv(csv, r);
  CHECK(csv.str() == "sample_id,cd,pr,iv,vr_flag\na,0.5,0.75,30,1\nb,1.5,0.25,,0\n");
  std::ostringstream js;
  write_report_json(js, r);
  CHECK(js.str().find("\"vr\"") != std::string::npos);
}
