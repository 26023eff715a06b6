#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "geoknit/error.hpp"
#include "geoknit/guidance/costs.hpp"
#include "geoknit/guidance/guided_sampling.hpp"
#include "geoknit/guidance/predictor.hpp"
#include "geoknit/pipeline/synth.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace geoknit;

namespace {

BoundaryEdge straight(Point3 a, Point3 b) {
  BoundaryEdge e;
  for (int i = 0; i < kGridRes; ++i) e.samples[static_cast<std::size_t>(i)] = a + (static_cast<double>(i) / (kGridRes - 1)) * (b - a);
  return e;
}

BoxSet random_boxes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2, 2);
  BoxSet x(n);
  for (double& v : x.values) v = u(rng);
  return x;
}

ModelConfig tiny() {
  ModelConfig m;
  m.width = 16;
  m.mlp_hidden = 32;
  m.blocks = 1;
  m.seed = 5;
  return m;
}

}  // namespace

TEST_CASE("d_geo") {
  std::mt19937_64 rng(81);
  const BoxSet g = random_boxes(rng, 3);
  CHECK(d_geo(g, g) == 0.0);
  BoxSet one(1);
  one.set_box(0, {{0, 0, 0}, {1, 2, 3}});
  BoxSet moved(1);
  moved.set_box(0, {{1, 0, 0}, {2, 2, 3}});
  CHECK(d_geo(moved, one) == doctest::Approx(1.0).epsilon(1e-15));
  for (int k = 0; k < 10; ++k) {
    const BoxSet c = random_boxes(rng, 5), gd = random_boxes(rng, 3);
    CHECK(std::abs(d_geo(c, gd) - oracle::d_geo(c, gd)) <= 1e-12);
  }
  CHECK_THROWS_AS(d_geo(BoxSet(0), one), Error);
}

TEST_CASE("c_pos") {
  const FaceGrid a = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  CHECK(c_pos(oracle::square({1, 1, 0}, {1, 0, 0}, {0, 1, 0}), a) == 0.0);
  CHECK(c_pos(oracle::square({0, 0, 0.3}, {1, 0, 0}, {0, 1, 0}), a) == doctest::Approx(0.3).epsilon(1e-12));
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 3; ++k) {
    const FaceGrid g = oracle::square({u(rng), u(rng), 0.5 + u(rng)}, {1, u(rng), 0.2}, {u(rng), 1, 0.1});
    const TriangleSoup mesh = triangulate(a);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : g.points) best = std::min(best, oracle::closest_on_soup(p, mesh).sq);
    CHECK(c_pos(g, a) == doctest::Approx(std::sqrt(best)).epsilon(1e-12));
  }
}

TEST_CASE("edge costs") {
  const BoundaryEdge e1 = straight({0, 0, 0}, {1, 0, 0});
  const BoundaryEdge e2 = straight({0, 0, 0}, {2, 0, 0});
  CHECK(c_len(e1, e2) == doctest::Approx(1.0 / 961.0).epsilon(1e-12));
  CHECK(c_len(e1, e1) == 0.0);
  CHECK(c_len(e1, straight({3, 1, 2}, {3, 2, 2})) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  CHECK(c_angle(e1, straight({0, 5, 0}, {1, 5, 0})) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(c_angle(e1, straight({0, 0, 0}, {0, 1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c_angle(e1, straight({1, 0, 0}, {0, 0, 0})) == doctest::Approx(2.0).epsilon(1e-12));
  BoundaryEdge bad = e1;
  bad.samples[4] = bad.samples[3];
  try {
    c_angle(bad, e1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "degenerate-segment");
  }
}

TEST_CASE("c_shape") {
  const FaceGrid a = oracle::square({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const MatchedEdges self = match_edges(a, a);
  CHECK(c_shape(a, a, self, 1.0, 0.0) == 0.0);
  CHECK(c_shape(a, a, self, 1.0, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const FaceGrid b = oracle::square({0, 0, 1}, {2, 0, 0}, {0, 0.5, 0});
  const MatchedEdges m = match_edges(a, b);
  double manual = 0.0;
  const auto ea = boundary_edges(a);
  for (int k = 0; k < 4; ++k) {
    const BoundaryEdge p = partner_edge(b, m, k);
    manual += c_len(ea[static_cast<std::size_t>(k)], p) + 0.5 * c_angle(ea[static_cast<std::size_t>(k)], p);
  }
  CHECK(c_shape(a, b, m, 1.0, 0.5) == doctest::Approx(manual).epsilon(1e-12));

  // Length term ignores a pure rotation of the generated face.
  const double c = std::cos(0.7), s = std::sin(0.7);
  const FaceGrid rot = oracle::square({0, 0, 0}, {c, s, 0}, {-s, c, 0});
  CHECK(c_shape(rot, b, m, 1.0, 0.0) == doctest::Approx(c_shape(a, b, m, 1.0, 0.0)).epsilon(1e-12));
}

TEST_CASE("guidance weights and the guiding sample") {
  GuidanceConfig cfg;
  const PairWeights off = guidance_weights(cfg, 40, 1000);
  CHECK(off.pos == 0.0);
  CHECK(off.shape == 0.0);
  const PairWeights on = guidance_weights(cfg, 50, 1000);
  CHECK(on.pos == 1.0);
  CHECK(on.shape == 1.0);
  CHECK(on.len == 1.0);
  CHECK(on.angle == 0.0);

  const AssemblySample smp = synth_peg_socket(PegSocketParams{});
  std::mt19937_64 rng(83);
  BoxSet x = random_boxes(rng, 6);
  x.contact_mask = {1, 1, 0, 0, 0, 0};
  const GuidingSample idle = predict_guiding_sample(x, smp.condition, 40, 1000, cfg);
  CHECK(idle.boxes == x);

  const GuidingSample active = predict_guiding_sample(x, smp.condition, 90, 1000, cfg);
  CHECK(active.pairs.size() == 2u);
  CHECK(active.guide.count == 2u);
  for (std::size_t i = 0; i < active.cost_after.size(); ++i) CHECK(active.cost_after[i] <= active.cost_before[i]);
  for (std::size_t r = 2; r < 6; ++r)
    for (std::size_t k = 0; k < 6; ++k) CHECK(active.boxes.row(r)[k] == x.row(r)[k]);

  PartModel bare = smp.condition;
  bare.contact_indices.clear();
  try {
    predict_guiding_sample(x, bare, 90, 1000, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "no-condition-contacts");
  }
}

TEST_CASE("guided steps") {
  const NoiseSchedule s = NoiseSchedule::linear();
  const Denoiser model(tiny());
  const AssemblySample smp = synth_peg_socket(PegSocketParams{});
  const PreparedCondition c = model.prepare(make_condition(smp.condition, smp.prompt));
  const ConditionGeometry geom = prepare_condition_geometry(smp.condition);
  std::mt19937_64 rng(84);
  BoxSet x = random_boxes(rng, 6);
  x.contact_mask = {1, 1, 0, 0, 0, 0};
  GuidanceConfig cfg;

  const BoxSet plain = reverse_step(model, s, x, 100, c, chain_noise(6, 6, 100, 3));
  CHECK(guided_reverse_step(model, s, x, 100, c, geom, cfg, 3) == plain);

  StepTrace tr;
  const BoxSet picked = guided_reverse_step(model, s, x, 90, c, geom, cfg, 3, &tr);
  CHECK(tr.t == 90);
  REQUIRE(tr.scores.size() == cfg.n_p);
  CHECK(tr.chosen == argmin_score(tr.scores));
  const auto cands = guided_candidates(model, s, reverse_step(model, s, x, 90, c, chain_noise(6, 6, 90, 3)), 90, c, cfg, 3);
  CHECK(picked == cands[tr.chosen]);

  CHECK(argmin_score({3.0, 1.0, 1.0, 2.0}) == 1u);
  CHECK_THROWS_AS(argmin_score({}), Error);
}

TEST_CASE("generate and the trace") {
  const NoiseSchedule s = NoiseSchedule::linear(200);
  const Denoiser model(tiny());
  const AssemblySample smp = synth_peg_socket(PegSocketParams{});
  GenerationConfig g;
  g.guidance.guidance_steps = {20, 15, 10, 5};
  g.guidance.theta_pos = g.guidance.theta_shape = 0.01;
  const GenerationResult guided = generate(model, s, smp.condition, smp.prompt, g, 12);
  REQUIRE(guided.trace.size() == 4u);
  CHECK(guided.trace[0].t == 20);
  CHECK(guided.trace[3].t == 5);
  CHECK(guided.model.faces.size() == 6u);
  CHECK(guided.model.contact_indices == std::vector<int>{0, 1});

  std::ostringstream out;
  write_trace(out, guided.trace);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("scores").size() == 6u);
    ++lines;
  }
  CHECK(lines == 4);

  GenerationConfig u = g;
  u.guided = false;
  CHECK(generate(model, s, smp.condition, smp.prompt, u, 12).trace.empty());
  GenerationConfig bad = g;
  bad.guidance.guidance_steps = {500};
  CHECK_THROWS_AS(generate(model, s, smp.condition, smp.prompt, bad, 12), Error);
}
