#include "geoknit/diffusion/schedule.hpp"

#include "geoknit/error.hpp"

namespace geoknit {

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw Error("invalid-argument", "schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0))
    throw Error("invalid-argument", "need 0 < beta_start < beta_end < 1");
  NoiseSchedule s;
  s.steps = steps;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  const auto n = static_cast<std::size_t>(steps) + 1;
  s.beta.resize(n);
  s.alpha.resize(n);
  s.alpha_bar.resize(n);
  double prod = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    s.beta[t] = beta_start + (beta_end - beta_start) * static_cast<double>(t) / static_cast<double>(steps);
    s.alpha[t] = 1.0 - s.beta[t];
    prod *= s.alpha[t];
    s.alpha_bar[t] = prod;
  }
  return s;
}

double NoiseSchedule::posterior_variance(int t) const {
  if (t < 1 || t > steps) throw Error("invalid-step", "posterior variance needs 1 <= t <= T");
  const auto i = static_cast<std::size_t>(t);
  return beta[i] * (1.0 - alpha_bar[i - 1]) / (1.0 - alpha_bar[i]);
}

void NoiseSchedule::check_step(int t) const {
  if (t < 0 || t > steps) throw Error("invalid-step", "timestep outside 0..T");
}

}  // namespace geoknit
