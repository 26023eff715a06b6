#pragma once

#include <cstddef>
#include <vector>

#include "geoknit/brep/boxset.hpp"

namespace geoknit {

/// Normalized box centers (zero centroid, unit RMS radius) and unit-length
/// dimension vectors.
struct BoxFeatures {
  std::vector<Point3> centers;
  std::vector<Point3> ratios;
  std::size_t size() const { return centers.size(); }
};

/// Dimensions are taken as |max - min| clamped to >= 1e-9. Throws Error
/// "empty-set". Requires dim == 6.
BoxFeatures box_features(const BoxSet& boxes);

struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> t;  // row-major
  double operator()(std::size_t i, std::size_t j) const { return t[i * cols + j]; }
};

struct FgwOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
};

struct FgwResult {
  double distance = 0.0;
  TransportPlan plan;
  int iterations = 0;
  std::vector<double> objective;     // per iterate, starting with the uniform plan
  std::vector<double> marginal_error;  // max |row/col sum - 1/n|, per iterate
};

/// Frank-Wolfe minimization of the fused Gromov-Wasserstein objective over
/// plans with uniform marginals, starting from the uniform plan.
FgwResult fgw_distance(const BoxFeatures& a, const BoxFeatures& b, double lambda, const FgwOptions& options = {});

/// The objective evaluated directly at a plan (quadruple sum over W^2).
double fgw_objective(const BoxFeatures& a, const BoxFeatures& b, double lambda, const TransportPlan& plan);

double d_reg(const BoxSet& candidate, const BoxSet& reference, double lambda);

}  // namespace geoknit
