#pragma once

#include <cstdint>
#include <vector>

namespace geoknit {

struct GuidanceConfig {
  std::size_t n_p = 6;           // candidates per guided step
  double omega_u = 1.0;          // weight of the FGW term in the score
  double lambda = 0.5;           // FGW feature/structure trade-off
  double delta = 0.1;            // contact tolerance
  std::vector<int> guidance_steps{110, 90, 70, 50};
  double theta_pos = 0.04;       // lambda_pos(t) = [t/T > theta_pos]
  double theta_shape = 0.04;     // lambda_shape(t) = [t/T > theta_shape]
  double lambda_len = 1.0;
  double lambda_angle = 0.0;
  int optimizer_steps = 200;
  double learning_rate = 0.05;
  int max_halvings = 10;
  int ula_steps = 5;             // K
  double ula_scale = 0.1;        // eta = ula_scale (1 - abar_t)
};

}  // namespace geoknit
