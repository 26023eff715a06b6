#include <immintrin.h>

#include <limits>

#include "triangle_scalar.hpp"

namespace geoknit::simd {
namespace {

inline __m256d ld(const double* p, std::size_t i) { return _mm256_loadu_pd(p + i); }

// n . (e x v), evaluated in the scalar association order.
inline __m256d side(__m256d nx, __m256d ny, __m256d nz, __m256d ex, __m256d ey, __m256d ez, __m256d vx,
                    __m256d vy, __m256d vz) {
  const __m256d c0 = _mm256_sub_pd(_mm256_mul_pd(ey, vz), _mm256_mul_pd(ez, vy));
  const __m256d c1 = _mm256_sub_pd(_mm256_mul_pd(ez, vx), _mm256_mul_pd(ex, vz));
  const __m256d c2 = _mm256_sub_pd(_mm256_mul_pd(ex, vy), _mm256_mul_pd(ey, vx));
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, c0), _mm256_mul_pd(ny, c1)), _mm256_mul_pd(nz, c2));
}

inline __m256d dot3(__m256d ax, __m256d ay, __m256d az, __m256d bx, __m256d by, __m256d bz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ax, bx), _mm256_mul_pd(ay, by)), _mm256_mul_pd(az, bz));
}

inline __m256d seg_sq(__m256d vx, __m256d vy, __m256d vz, __m256d ex, __m256d ey, __m256d ez, __m256d inv) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d s = _mm256_mul_pd(dot3(vx, vy, vz, ex, ey, ez), inv);
  s = _mm256_min_pd(_mm256_max_pd(s, zero), one);
  const __m256d dx = _mm256_sub_pd(vx, _mm256_mul_pd(s, ex));
  const __m256d dy = _mm256_sub_pd(vy, _mm256_mul_pd(s, ey));
  const __m256d dz = _mm256_sub_pd(vz, _mm256_mul_pd(s, ez));
  return dot3(dx, dy, dz, dx, dy, dz);
}

inline __m256d triangle4(const TriangleArrays& t, std::size_t i, __m256d px, __m256d py, __m256d pz) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d apx = _mm256_sub_pd(px, ld(t.ax, i)), apy = _mm256_sub_pd(py, ld(t.ay, i)),
                apz = _mm256_sub_pd(pz, ld(t.az, i));
  const __m256d bpx = _mm256_sub_pd(px, ld(t.bx, i)), bpy = _mm256_sub_pd(py, ld(t.by, i)),
                bpz = _mm256_sub_pd(pz, ld(t.bz, i));
  const __m256d cpx = _mm256_sub_pd(px, ld(t.cx, i)), cpy = _mm256_sub_pd(py, ld(t.cy, i)),
                cpz = _mm256_sub_pd(pz, ld(t.cz, i));
  const __m256d nx = ld(t.nx, i), ny = ld(t.ny, i), nz = ld(t.nz, i);
  const __m256d abx = ld(t.abx, i), aby = ld(t.aby, i), abz = ld(t.abz, i);
  const __m256d acx = ld(t.acx, i), acy = ld(t.acy, i), acz = ld(t.acz, i);
  const __m256d bcx = ld(t.bcx, i), bcy = ld(t.bcy, i), bcz = ld(t.bcz, i);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d cax = _mm256_xor_pd(acx, sign), cay = _mm256_xor_pd(acy, sign), caz = _mm256_xor_pd(acz, sign);

  const __m256d s_ab = side(nx, ny, nz, abx, aby, abz, apx, apy, apz);
  const __m256d s_bc = side(nx, ny, nz, bcx, bcy, bcz, bpx, bpy, bpz);
  const __m256d s_ca = side(nx, ny, nz, cax, cay, caz, cpx, cpy, cpz);

  const __m256d h = dot3(apx, apy, apz, nx, ny, nz);
  const __m256d d_plane = _mm256_mul_pd(_mm256_mul_pd(h, h), ld(t.inv_nn, i));

  const __m256d d_ab = seg_sq(apx, apy, apz, abx, aby, abz, ld(t.inv_ab, i));
  const __m256d d_ac = seg_sq(apx, apy, apz, acx, acy, acz, ld(t.inv_ac, i));
  const __m256d d_bc = seg_sq(bpx, bpy, bpz, bcx, bcy, bcz, ld(t.inv_bc, i));
  const __m256d d_edge = _mm256_min_pd(d_ab, _mm256_min_pd(d_ac, d_bc));

  const __m256d inside = _mm256_and_pd(
      _mm256_and_pd(_mm256_cmp_pd(s_ab, zero, _CMP_GE_OQ), _mm256_cmp_pd(s_bc, zero, _CMP_GE_OQ)),
      _mm256_cmp_pd(s_ca, zero, _CMP_GE_OQ));
  return _mm256_blendv_pd(d_edge, d_plane, inside);
}

MinResult reduce_lanes(__m256d best, __m256d idx) {
  alignas(32) double d[4];
  alignas(32) double ix[4];
  _mm256_store_pd(d, best);
  _mm256_store_pd(ix, idx);
  MinResult r{d[0], static_cast<std::size_t>(ix[0])};
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(ix[l]);
    if (d[l] < r.sq_dist || (d[l] == r.sq_dist && li < r.index)) r = {d[l], li};
  }
  return r;
}

MinResult triangle_min_avx2(const TriangleArrays& tris, std::size_t begin, std::size_t end, const double p[3]) {
  const __m256d px = _mm256_set1_pd(p[0]), py = _mm256_set1_pd(p[1]), pz = _mm256_set1_pd(p[2]);
  MinResult best{std::numeric_limits<double>::infinity(), begin};
  std::size_t i = begin;
  if (end - begin >= 4) {
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d vidx = _mm256_setzero_pd();
    __m256d cur = _mm256_setr_pd(double(i), double(i + 1), double(i + 2), double(i + 3));
    const __m256d four = _mm256_set1_pd(4.0);
    for (; i + 4 <= end; i += 4) {
      const __m256d d = triangle4(tris, i, px, py, pz);
      const __m256d lt = _mm256_cmp_pd(d, vbest, _CMP_LT_OQ);
      vbest = _mm256_blendv_pd(vbest, d, lt);
      vidx = _mm256_blendv_pd(vidx, cur, lt);
      cur = _mm256_add_pd(cur, four);
    }
    best = reduce_lanes(vbest, vidx);
  }
  for (; i < end; ++i) {
    const double d = detail::triangle_sq_dist(tris, i, p);
    if (d < best.sq_dist) best = {d, i};
  }
  return best;
}

void triangle_dists_avx2(const TriangleArrays& tris, std::size_t begin, std::size_t end, const double p[3],
                         double* out) {
  const __m256d px = _mm256_set1_pd(p[0]), py = _mm256_set1_pd(p[1]), pz = _mm256_set1_pd(p[2]);
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) _mm256_storeu_pd(out + (i - begin), triangle4(tris, i, px, py, pz));
  for (; i < end; ++i) out[i - begin] = detail::triangle_sq_dist(tris, i, p);
}

MinResult point_min_avx2(const PointArrays& pts, std::size_t n, const double q[3]) {
  const __m256d qx = _mm256_set1_pd(q[0]), qy = _mm256_set1_pd(q[1]), qz = _mm256_set1_pd(q[2]);
  MinResult best{std::numeric_limits<double>::infinity(), 0};
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d vidx = _mm256_setzero_pd();
    __m256d cur = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    for (; i + 4 <= n; i += 4) {
      const __m256d dx = _mm256_sub_pd(ld(pts.x, i), qx);
      const __m256d dy = _mm256_sub_pd(ld(pts.y, i), qy);
      const __m256d dz = _mm256_sub_pd(ld(pts.z, i), qz);
      const __m256d d = dot3(dx, dy, dz, dx, dy, dz);
      const __m256d lt = _mm256_cmp_pd(d, vbest, _CMP_LT_OQ);
      vbest = _mm256_blendv_pd(vbest, d, lt);
      vidx = _mm256_blendv_pd(vidx, cur, lt);
      cur = _mm256_add_pd(cur, four);
    }
    best = reduce_lanes(vbest, vidx);
  }
  for (; i < n; ++i) {
    const double d = detail::point_sq_dist(pts, i, q);
    if (d < best.sq_dist) best = {d, i};
  }
  return best;
}

void gemm_acc_avx2(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda, const double* b,
                   std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * ldc;
    const double* arow = a + i * lda;
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
      __m256d c0 = _mm256_loadu_pd(crow + j), c1 = _mm256_loadu_pd(crow + j + 4);
      __m256d c2 = _mm256_loadu_pd(crow + j + 8), c3 = _mm256_loadu_pd(crow + j + 12);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256d av = _mm256_set1_pd(arow[kk]);
        const double* brow = b + kk * ldb + j;
        c0 = _mm256_add_pd(c0, _mm256_mul_pd(av, _mm256_loadu_pd(brow)));
        c1 = _mm256_add_pd(c1, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 4)));
        c2 = _mm256_add_pd(c2, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 8)));
        c3 = _mm256_add_pd(c3, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 12)));
      }
      _mm256_storeu_pd(crow + j, c0);
      _mm256_storeu_pd(crow + j + 4, c1);
      _mm256_storeu_pd(crow + j + 8, c2);
      _mm256_storeu_pd(crow + j + 12, c3);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d c0 = _mm256_loadu_pd(crow + j);
      for (std::size_t kk = 0; kk < k; ++kk)
        c0 = _mm256_add_pd(c0, _mm256_mul_pd(_mm256_set1_pd(arow[kk]), _mm256_loadu_pd(b + kk * ldb + j)));
      _mm256_storeu_pd(crow + j, c0);
    }
    for (; j < n; ++j) {
      double acc = crow[j];
      for (std::size_t kk = 0; kk < k; ++kk) acc = acc + arow[kk] * b[kk * ldb + j];
      crow[j] = acc;
    }
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{triangle_min_avx2, triangle_dists_avx2, point_min_avx2, gemm_acc_avx2};
  return &table;
}

}  // namespace geoknit::simd
