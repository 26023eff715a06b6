#pragma once

// Per-element scalar forms shared by the scalar kernels and the AVX2 tails.
// Comparisons are written in the operand order of the x86 min/max/blend
// instructions so both paths round and select identically.

#include <cstddef>

#include "geoknit/simd/kernels.hpp"

namespace geoknit::simd::detail {

inline double max0(double t) { return t > 0.0 ? t : 0.0; }
inline double min1(double t) { return t < 1.0 ? t : 1.0; }
inline double vmin(double a, double b) { return a < b ? a : b; }

inline double triangle_sq_dist(const TriangleArrays& t, std::size_t i, const double p[3]) {
  const double apx = p[0] - t.ax[i], apy = p[1] - t.ay[i], apz = p[2] - t.az[i];
  const double bpx = p[0] - t.bx[i], bpy = p[1] - t.by[i], bpz = p[2] - t.bz[i];
  const double cpx = p[0] - t.cx[i], cpy = p[1] - t.cy[i], cpz = p[2] - t.cz[i];
  const double nx = t.nx[i], ny = t.ny[i], nz = t.nz[i];

  // Side of each edge, measured along the triangle normal.
  const double abx = t.abx[i], aby = t.aby[i], abz = t.abz[i];
  const double s_ab = nx * (aby * apz - abz * apy) + ny * (abz * apx - abx * apz) + nz * (abx * apy - aby * apx);
  const double bcx = t.bcx[i], bcy = t.bcy[i], bcz = t.bcz[i];
  const double s_bc = nx * (bcy * bpz - bcz * bpy) + ny * (bcz * bpx - bcx * bpz) + nz * (bcx * bpy - bcy * bpx);
  const double cax = -t.acx[i], cay = -t.acy[i], caz = -t.acz[i];
  const double s_ca = nx * (cay * cpz - caz * cpy) + ny * (caz * cpx - cax * cpz) + nz * (cax * cpy - cay * cpx);

  const double h = apx * nx + apy * ny + apz * nz;
  const double d_plane = h * h * t.inv_nn[i];

  double s = max0((apx * abx + apy * aby + apz * abz) * t.inv_ab[i]);
  s = min1(s);
  double dx = apx - s * abx, dy = apy - s * aby, dz = apz - s * abz;
  const double d_ab = dx * dx + dy * dy + dz * dz;

  const double acx = t.acx[i], acy = t.acy[i], acz = t.acz[i];
  s = min1(max0((apx * acx + apy * acy + apz * acz) * t.inv_ac[i]));
  dx = apx - s * acx; dy = apy - s * acy; dz = apz - s * acz;
  const double d_ac = dx * dx + dy * dy + dz * dz;

  s = min1(max0((bpx * bcx + bpy * bcy + bpz * bcz) * t.inv_bc[i]));
  dx = bpx - s * bcx; dy = bpy - s * bcy; dz = bpz - s * bcz;
  const double d_bc = dx * dx + dy * dy + dz * dz;

  const double d_edge = vmin(d_ab, vmin(d_ac, d_bc));
  const bool inside = (s_ab >= 0.0) & (s_bc >= 0.0) & (s_ca >= 0.0);
  return inside ? d_plane : d_edge;
}

inline double point_sq_dist(const PointArrays& pts, std::size_t i, const double q[3]) {
  const double dx = pts.x[i] - q[0], dy = pts.y[i] - q[1], dz = pts.z[i] - q[2];
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace geoknit::simd::detail
