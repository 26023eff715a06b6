#pragma once

#include <vector>

namespace geoknit {

/// Linear-beta DDPM schedule indexed t = 0..T (T+1 entries).
struct NoiseSchedule {
  int steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  static NoiseSchedule linear(int steps = 1000, double beta_start = 1e-4, double beta_end = 0.02);

  /// beta_t (1 - abar_{t-1}) / (1 - abar_t) for t >= 1.
  double posterior_variance(int t) const;
  void check_step(int t) const;  // Error "invalid-step" outside 0..T
};

}  // namespace geoknit
