#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Every kernel is lane-parallel over independent outputs (triangles, points,
// matrix columns) and performs the same operations in the same order as the
// scalar loop, without fused multiply-add. The two paths are therefore
// bit-identical, which the equivalence tests assert exactly.

#include <cstddef>
#include <string_view>

namespace geoknit::simd {

enum class Isa { scalar, avx2 };

/// Structure-of-arrays triangle block with per-triangle precomputation for
/// the branchless point-to-triangle distance.
struct TriangleArrays {
  const double* ax; const double* ay; const double* az;
  const double* bx; const double* by; const double* bz;
  const double* cx; const double* cy; const double* cz;
  const double* abx; const double* aby; const double* abz;
  const double* acx; const double* acy; const double* acz;
  const double* bcx; const double* bcy; const double* bcz;
  const double* nx; const double* ny; const double* nz;
  const double* inv_ab; const double* inv_ac; const double* inv_bc; const double* inv_nn;
};

struct PointArrays {
  const double* x; const double* y; const double* z;
};

struct MinResult {
  double sq_dist;
  std::size_t index;  // lowest index among ties
};

struct KernelTable {
  /// Squared distance from p to each triangle in [begin, end); returns the
  /// minimum and its lowest index. begin < end required.
  MinResult (*triangle_min_sq_dist)(const TriangleArrays& tris, std::size_t begin, std::size_t end,
                                    const double p[3]);
  /// Writes the squared distance from p to triangles [begin, end) into out.
  void (*triangle_sq_dists)(const TriangleArrays& tris, std::size_t begin, std::size_t end,
                            const double p[3], double* out);
  /// Nearest point of a point set to q (squared distance, lowest index on ties).
  MinResult (*point_min_sq_dist)(const PointArrays& pts, std::size_t n, const double q[3]);
  /// C[m x n] += A[m x k] * B[k x n], all row-major with the given strides.
  void (*gemm_acc)(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda,
                   const double* b, std::size_t ldb, double* c, std::size_t ldc);
};

const KernelTable& scalar_kernels();
/// Null when the binary was built without AVX2 kernels.
const KernelTable* avx2_kernels();

/// Kernels for the active ISA. Chosen once at first use: AVX2 when the CPU
/// supports it, unless GEOKNIT_SIMD=scalar is set in the environment.
const KernelTable& kernels();
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Overrides the runtime choice (tests and benchmarks). Throws Error
/// "isa-unavailable" when the CPU or build lacks the requested ISA.
void force_isa(Isa isa);

}  // namespace geoknit::simd
