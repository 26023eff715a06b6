#include <limits>

#include "triangle_scalar.hpp"

namespace geoknit::simd {
namespace {

MinResult triangle_min_scalar(const TriangleArrays& tris, std::size_t begin, std::size_t end,
                              const double p[3]) {
  MinResult best{std::numeric_limits<double>::infinity(), begin};
  for (std::size_t i = begin; i < end; ++i) {
    const double d = detail::triangle_sq_dist(tris, i, p);
    if (d < best.sq_dist) best = {d, i};
  }
  return best;
}

void triangle_dists_scalar(const TriangleArrays& tris, std::size_t begin, std::size_t end,
                           const double p[3], double* out) {
  for (std::size_t i = begin; i < end; ++i) out[i - begin] = detail::triangle_sq_dist(tris, i, p);
}

MinResult point_min_scalar(const PointArrays& pts, std::size_t n, const double q[3]) {
  MinResult best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = detail::point_sq_dist(pts, i, q);
    if (d < best.sq_dist) best = {d, i};
  }
  return best;
}

void gemm_acc_scalar(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda,
                     const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * ldc;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * lda + kk];
      const double* brow = b + kk * ldb;
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + aik * brow[j];
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{triangle_min_scalar, triangle_dists_scalar, point_min_scalar,
                                 gemm_acc_scalar};
  return table;
}

}  // namespace geoknit::simd
