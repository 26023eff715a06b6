#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "geoknit/brep/sew.hpp"
#include "geoknit/error.hpp"
#include "geoknit/pipeline/heatmap.hpp"
#include "geoknit/pipeline/json_io.hpp"
#include "geoknit/pipeline/normalize.hpp"
#include "geoknit/pipeline/synth.hpp"
#include "oracles.hpp"

using namespace geoknit;
namespace fs = std::filesystem;

namespace {

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::vector<std::pair<int, int>> labeled(const AssemblySample& s) {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : s.contact_pairs.pairs) out.emplace_back(p.a, p.b);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geoknit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("synthetic families") {
  for (Family f : {Family::peg_socket, Family::flange_ring, Family::bracket_plate}) {
    CHECK(family_from_string(to_string(f)) == f);
    std::mt19937_64 rng(100 + static_cast<int>(f));
    for (int k = 0; k < 3; ++k) {
      const AssemblySample s = synth_assembly(f, rng);
      CAPTURE(to_string(f));
      CHECK(s.family == f);
      CHECK_FALSE(s.intended_pairs.empty());
      CHECK(labeled(s) == s.intended_pairs);
      CHECK(is_watertight(triangulate(s.condition)));
      CHECK(is_watertight(triangulate(s.target)));
      CHECK_FALSE(s.condition.contact_indices.empty());
      CHECK_FALSE(s.prompt.empty());
    }
  }
  CHECK(error_code([] { family_from_string("teapot"); }) == "invalid-argument");
}

TEST_CASE("random parameters are always feasible") {
  const auto ds = synth_dataset({Family::peg_socket, Family::flange_ring, Family::bracket_plate}, 90, 5);
  for (const auto& s : ds) CHECK(labeled(s) == s.intended_pairs);
}

TEST_CASE("default family layouts") {
  const AssemblySample peg = synth_peg_socket(PegSocketParams{});
  CHECK(peg.condition.faces.size() == 34u);
  CHECK(peg.target.faces.size() == 6u);
  CHECK(peg.intended_pairs == std::vector<std::pair<int, int>>{{8, 0}, {9, 1}});

  PegSocketParams loose;
  loose.clearance = 2 * kDefaultDelta;
  CHECK(synth_peg_socket(loose).contact_pairs.pairs.empty());

  PegSocketParams bad;
  bad.hole_depth = 10.0;
  CHECK(error_code([&] { synth_peg_socket(bad); }) == "infeasible-params");

  CHECK(synth_flange_ring(FlangeRingParams{}).target.faces.size() == 32u);
  const AssemblySample br = synth_bracket_plate(BracketPlateParams{});
  CHECK(br.target.faces.size() == 14u);
  CHECK(br.intended_pairs == std::vector<std::pair<int, int>>{{5, 0}, {5, 1}});
}

TEST_CASE("synth_dataset is seed-deterministic") {
  const auto a = synth_dataset({Family::peg_socket, Family::bracket_plate}, 4, 77);
  const auto b = synth_dataset({Family::peg_socket, Family::bracket_plate}, 4, 77);
  REQUIRE(a.size() == 4u);
  for (std::size_t i = 0; i < 4; ++i) CHECK(sample_to_json(a[i]) == sample_to_json(b[i]));
  CHECK(a[1].family == Family::bracket_plate);
  CHECK_FALSE(sample_to_json(a[0]) == sample_to_json(synth_dataset({Family::peg_socket}, 1, 78)[0]));
}

TEST_CASE("normalize") {
  PartModel big = oracle::box_part({0, 0, 0}, {12, 12, 12});
  const NormalizationTransform tf = normalization_for(big);
  CHECK(tf.scale == doctest::Approx(0.5));
  CHECK(tf.translation.x == doctest::Approx(-6.0));
  CHECK(tf.apply({12, 0, 6}) == Point3{3, -3, 0});

  const AssemblySample peg = synth_peg_socket(PegSocketParams{});
  const NormalizationTransform id = normalization_for(peg.condition);
  CHECK(id.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(id.translation) < 1e-12);

  AssemblySample moved = peg;
  moved.condition = apply_transform(peg.condition, {{5, -2, 1}, 0.25});
  moved.target = apply_transform(peg.target, {{5, -2, 1}, 0.25});
  auto [n1, t1] = normalize(moved);
  CHECK(labeled(n1) == labeled(peg));
  // The target never affects the transform.
  AssemblySample other = moved;
  other.target = apply_transform(other.target, {{30, 0, 0}, 1.0});
  const auto t2 = normalize(other).second;
  CHECK(t2.scale == t1.scale);
  CHECK(t2.translation == t1.translation);
  // Idempotent.
  const auto t3 = normalization_for(n1.condition);
  CHECK(t3.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(t3.translation) < 1e-12);

  PartModel flat;
  flat.faces.push_back(make_face_entry(oracle::square({0, 0, 0}, {0, 0, 0}, {0, 0, 0})));
  CHECK(error_code([&] { normalization_for(flat); }) == "degenerate-model");
}

TEST_CASE("json round trip") {
  const AssemblySample s = synth_flange_ring(FlangeRingParams{});
  const nlohmann::json j = sample_to_json(s);
  const AssemblySample back = sample_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.condition == s.condition);
  CHECK(back.target == s.target);
  CHECK(back.intended_pairs == s.intended_pairs);
  CHECK(labeled(back) == labeled(s));
  CHECK(back.contact_pairs.pairs == s.contact_pairs.pairs);

  const fs::path dir = scratch("json");
  write_dataset(dir.string(), {s, synth_peg_socket(PegSocketParams{})});
  CHECK(json_files_in(dir.string()) ==
        std::vector<std::string>{(dir / "sample_00000.json").string(), (dir / "sample_00001.json").string()});
  const auto ds = read_dataset(dir.string());
  CHECK(ds.size() == 2u);
  CHECK(ds[0].target == s.target);

  write_part((dir / "part.json").string(), s.target);
  CHECK(read_part((dir / "part.json").string()) == s.target);
  fs::remove_all(dir);
  CHECK(error_code([&] { read_part((dir / "missing.json").string()); }) == "io-error");
}

TEST_CASE("malformed input") {
  nlohmann::json j = part_to_json(oracle::box_part({0, 0, 0}, {1, 1, 1}));
  CHECK(error_code([] { part_from_json(nlohmann::json::parse(R"({"faces": 3})")); }) == "malformed-input");
  nlohmann::json short_grid = j;
  short_grid["faces"][0]["grid"].erase(0);
  CHECK(error_code([&] { part_from_json(short_grid); }) == "malformed-input");
  nlohmann::json bad_contact = j;
  bad_contact["contact_indices"] = {17};
  CHECK(error_code([&] { part_from_json(bad_contact); }) == "malformed-input");

  const fs::path dir = scratch("bad");
  {
    std::ofstream f(dir / "broken.json");
    f << "{ not json";
  }
  CHECK(error_code([&] { read_json_file((dir / "broken.json").string()); }) == "malformed-input");
  fs::remove(dir / "broken.json");
  CHECK_THROWS_AS(read_dataset(dir.string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("heatmap") {
  const std::vector<PartModel> parts{oracle::box_part({0, 0, 0}, {1, 1, 1}), oracle::box_part({0.5, 0, 0}, {1.5, 1, 1})};
  const OccupancyGrid g = top_down_occupancy(parts, 16);
  CHECK(g.counts.size() == 256u);
  CHECK(g.max_count() == 2);
  int twos = 0;
  for (int c : g.counts) twos += c == 2;
  CHECK(twos > 0);
  std::ostringstream svg;
  write_heatmap_svg(svg, g, 4);
  CHECK(svg.str().rfind("<svg", 0) == 0);
  CHECK(svg.str().find("#000000") != std::string::npos);
  CHECK(error_code([] { top_down_occupancy(std::vector<PartModel>{}, 8); }) == "empty-set");
}
