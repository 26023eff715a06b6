#include <random>
#include <vector>

#include "doctest.h"
#include "geoknit/brep/mesh.hpp"
#include "geoknit/error.hpp"
#include "geoknit/simd/kernels.hpp"
#include "oracles.hpp"

using namespace geoknit;

namespace {

std::vector<Triangle> random_triangles(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Triangle> t(n);
  for (auto& tri : t) {
    tri.a = {u(rng), u(rng), u(rng)};
    tri.b = tri.a + 0.5 * Point3{u(rng), u(rng), u(rng)};
    tri.c = tri.a + 0.5 * Point3{u(rng), u(rng), u(rng)};
  }
  return t;
}

}  // namespace

TEST_CASE("avx2 kernels are bit-identical to scalar") {
  const simd::KernelTable* avx = simd::avx2_kernels();
  if (avx == nullptr) {
    MESSAGE("built without AVX2 kernels");
    return;
  }
  const simd::KernelTable& sc = simd::scalar_kernels();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);

  SUBCASE("triangle distances") {
    for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u}) {
      const auto tris = random_triangles(rng, n);
      const PackedTriangles packed(tris);
      const auto arr = packed.arrays();
      for (int k = 0; k < 50; ++k) {
        const double p[3] = {u(rng), u(rng), u(rng)};
        std::vector<double> d1(n), d2(n);
        sc.triangle_sq_dists(arr, 0, n, p, d1.data());
        avx->triangle_sq_dists(arr, 0, n, p, d2.data());
        CHECK(d1 == d2);
        const std::size_t b = n > 2 ? 1 : 0;
        const auto m1 = sc.triangle_min_sq_dist(arr, b, n, p);
        const auto m2 = avx->triangle_min_sq_dist(arr, b, n, p);
        CHECK(m1.sq_dist == m2.sq_dist);
        CHECK(m1.index == m2.index);
      }
    }
  }
  SUBCASE("nearest point with ties") {
    std::vector<double> xs(37), ys(37), zs(37);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = static_cast<double>(i % 5);
      ys[i] = 0.0;
      zs[i] = 0.0;
    }
    const double q[3] = {2.0, 0.0, 0.0};
    const auto a = sc.point_min_sq_dist({xs.data(), ys.data(), zs.data()}, xs.size(), q);
    const auto b = avx->point_min_sq_dist({xs.data(), ys.data(), zs.data()}, xs.size(), q);
    CHECK(a.index == 2);
    CHECK(b.index == 2);
    for (int k = 0; k < 100; ++k) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = u(rng);
        ys[i] = u(rng);
        zs[i] = u(rng);
      }
      const double r[3] = {u(rng), u(rng), u(rng)};
      const auto s1 = sc.point_min_sq_dist({xs.data(), ys.data(), zs.data()}, xs.size(), r);
      const auto s2 = avx->point_min_sq_dist({xs.data(), ys.data(), zs.data()}, xs.size(), r);
      CHECK(s1.sq_dist == s2.sq_dist);
      CHECK(s1.index == s2.index);
    }
  }
  SUBCASE("gemm") {
    for (auto [m, k, n] : {std::tuple{1, 1, 1}, std::tuple{3, 7, 5}, std::tuple{8, 64, 64}, std::tuple{5, 13, 130}}) {
      std::vector<double> a(static_cast<std::size_t>(m * k)), b(static_cast<std::size_t>(k * n)),
          c1(static_cast<std::size_t>(m * n)), c2;
      for (double& v : a) v = u(rng);
      for (double& v : b) v = u(rng);
      for (double& v : c1) v = u(rng);
      c2 = c1;
      sc.gemm_acc(m, k, n, a.data(), k, b.data(), n, c1.data(), n);
      avx->gemm_acc(m, k, n, a.data(), k, b.data(), n, c2.data(), n);
      CHECK(c1 == c2);
    }
  }
}

TEST_CASE("triangle distance kernel agrees with the closest-point routine") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto tris = random_triangles(rng, 40);
  const PackedTriangles packed(tris);
  std::vector<double> d(tris.size());
  for (int k = 0; k < 200; ++k) {
    const Point3 p{u(rng), u(rng), u(rng)};
    const double q[3] = {p.x, p.y, p.z};
    simd::kernels().triangle_sq_dists(packed.arrays(), 0, tris.size(), q, d.data());
    for (std::size_t i = 0; i < tris.size(); ++i) {
      const double want = squared_norm(p - closest_point_on_triangle(p, tris[i]));
      CHECK(d[i] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("forcing an ISA switches the active table") {
  const simd::Isa before = simd::active_isa();
  simd::force_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(&simd::kernels() == &simd::scalar_kernels());
  if (simd::avx2_kernels() == nullptr) CHECK_THROWS_AS(simd::force_isa(simd::Isa::avx2), Error);
  simd::force_isa(before);
}
