#include <cmath>
#include <random>

#include "doctest.h"
#include "geoknit/error.hpp"
#include "geoknit/fgw/fgw.hpp"

using namespace geoknit;

namespace {

BoxSet cubes(const std::vector<Point3>& centers, double half = 0.5) {
  std::vector<BoundingBox> b;
  for (const auto& c : centers) b.push_back({c - Point3{half, half, half}, c + Point3{half, half, half}});
  return box_set_of(b);
}

BoxSet random_set(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2, 2), d(0.1, 1.5);
  std::vector<BoundingBox> b;
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 c{u(rng), u(rng), u(rng)}, h{d(rng), d(rng), d(rng)};
    b.push_back({c - h, c + h});
  }
  return box_set_of(b);
}

// Direct quadruple sum, written independently of the solver.
double direct_objective(const BoxFeatures& a, const BoxFeatures& b, double lambda, const TransportPlan& t) {
  double gw = 0.0, feat = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Point3 dr = a.ratios[i] - b.ratios[j];
      feat += (dr.x * dr.x + dr.y * dr.y + dr.z * dr.z) * t(i, j);
      for (std::size_t i2 = 0; i2 < a.size(); ++i2)
        for (std::size_t j2 = 0; j2 < b.size(); ++j2) {
          const Point3 ea = a.centers[i] - a.centers[i2], eb = b.centers[j] - b.centers[j2];
          const double w = std::sqrt(ea.x * ea.x + ea.y * ea.y + ea.z * ea.z) - std::sqrt(eb.x * eb.x + eb.y * eb.y + eb.z * eb.z);
          gw += w * w * t(i, j) * t(i2, j2);
        }
    }
  return (1.0 - lambda) * gw + lambda * feat;
}

}  // namespace

TEST_CASE("box_features") {
  const BoxFeatures one = box_features(cubes({{4, -2, 7}}));
  CHECK(one.centers[0] == Point3{0, 0, 0});
  const double r = 1.0 / std::sqrt(3.0);
  CHECK(one.ratios[0].x == doctest::Approx(r));
  CHECK(one.ratios[0].z == doctest::Approx(r));

  const BoxFeatures two = box_features(cubes({{0, 0, 0}, {2, 0, 0}}));
  CHECK(two.centers[0].x == doctest::Approx(-1.0));
  CHECK(two.centers[1].x == doctest::Approx(1.0));
  CHECK(two.centers[1].y == 0.0);

  CHECK_THROWS_AS(box_features(BoxSet(0, 6)), Error);

  std::mt19937_64 rng(51);
  const BoxSet x = random_set(rng, 5);
  BoxSet y = x;
  for (double& v : y.values) v = 2.5 * v + 1.25;
  const BoxFeatures fx = box_features(x), fy = box_features(y);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(distance(fx.centers[i], fy.centers[i]) < 1e-9);
    CHECK(distance(fx.ratios[i], fy.ratios[i]) < 1e-9);
  }
}

TEST_CASE("fgw examples") {
  SUBCASE("singleton ratios at lambda 1") {
    BoxFeatures a, b;
    a.centers = {{0, 0, 0}};
    b.centers = {{0, 0, 0}};
    a.ratios = {{1, 0, 0}};
    b.ratios = {{0, 1, 0}};
    CHECK(fgw_distance(a, b, 1.0).distance == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("self distance") {
    std::mt19937_64 rng(52);
    for (int k = 0; k < 5; ++k) {
      const BoxSet x = random_set(rng, 3 + static_cast<std::size_t>(k));
      CHECK(d_reg(x, x, 0.5) <= 1e-9);
      BoxSet y = x;
      for (double& v : y.values) v = 3.0 * v - 0.7;
      CHECK(d_reg(y, x, 0.5) <= 1e-6);
    }
  }
  SUBCASE("flipped aspect matches a direct evaluation at the solver's plan") {
    std::vector<BoundingBox> b{{{0, 0, 0}, {2, 1, 1}}, {{3, 0, 0}, {4, 1, 1}}, {{0, 3, 0}, {1, 4, 2}}};
    const BoxSet ref = box_set_of(b);
    b[0] = {{0, 0, 0}, {1, 2, 1}};
    const BoxSet cand = box_set_of(b);
    const BoxFeatures fa = box_features(cand), fb = box_features(ref);
    const FgwResult r = fgw_distance(fa, fb, 0.5);
    CHECK(r.distance > 0.0);
    CHECK(r.distance == doctest::Approx(direct_objective(fa, fb, 0.5, r.plan)).epsilon(1e-12));
    CHECK(d_reg(cand, ref, 0.5) == doctest::Approx(r.distance).epsilon(1e-12));
    CHECK(fgw_objective(fa, fb, 0.5, r.plan) == doctest::Approx(r.distance).epsilon(1e-12));
  }
}

TEST_CASE("fgw solver properties") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 4), m = 2 + static_cast<std::size_t>((k + 1) % 5);
    const BoxFeatures a = box_features(random_set(rng, n)), b = box_features(random_set(rng, m));
    const FgwResult r = fgw_distance(a, b, 0.5);
    for (double e : r.marginal_error) CHECK(e <= 1e-6);
    for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] + 1e-12);
    double total = 0.0;
    for (double v : r.plan.t) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("lambda extremes") {
  std::mt19937_64 rng(54);
  const BoxSet x = random_set(rng, 4), y = random_set(rng, 4);
  BoxFeatures fx = box_features(x), fy = box_features(y);

  // lambda 0: only structure, ratios do not matter.
  BoxFeatures fx_r = fx;
  for (auto& r : fx_r.ratios) r = Point3{0, 0, 1};
  CHECK(fgw_distance(fx, fy, 0.0).distance == doctest::Approx(fgw_distance(fx_r, fy, 0.0).distance).epsilon(1e-12));

  // lambda 1: only features, centers do not matter.
  BoxFeatures fx_c = fx;
  for (std::size_t i = 0; i < fx_c.size(); ++i) fx_c.centers[i] = fx.centers[(i + 1) % fx.size()] * 0.3;
  CHECK(fgw_distance(fx, fy, 1.0).distance == doctest::Approx(fgw_distance(fx_c, fy, 1.0).distance).epsilon(1e-12));
}
