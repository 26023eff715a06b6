#include "geoknit/diffusion/sampler.hpp"

#include <cmath>

#include "geoknit/error.hpp"
#include "geoknit/pipeline/parallel.hpp"

namespace geoknit {

std::mt19937_64 rng_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

Mat gaussian(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(count, dim);
  for (double& x : m.v) x = nd(rng);
  return m;
}

BoxSet forward_diffuse(const NoiseSchedule& s, const BoxSet& x0, int t, const Mat& noise) {
  s.check_step(t);
  if (noise.v.size() != x0.values.size()) throw Error("shape-mismatch", "noise shape differs from x0");
  const double a = std::sqrt(s.alpha_bar[static_cast<std::size_t>(t)]);
  const double b = std::sqrt(1.0 - s.alpha_bar[static_cast<std::size_t>(t)]);
  BoxSet xt = x0;
  for (std::size_t i = 0; i < xt.values.size(); ++i) xt.values[i] = a * x0.values[i] + b * noise.v[i];
  return xt;
}

BoxSet reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                    const PreparedCondition& c, const Mat& z) {
  if (t < 0 || t + 1 > s.steps) throw Error("invalid-step", "reverse_step needs 0 <= t < T");
  const auto k = static_cast<std::size_t>(t + 1);
  const Mat eps = model.predict(x_next, t + 1, c);
  const double coef = s.beta[k] / std::sqrt(1.0 - s.alpha_bar[k]);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(s.alpha[k]);
  const double sigma = t > 0 ? std::sqrt(s.posterior_variance(t + 1)) : 0.0;
  BoxSet out = x_next;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = (x_next.values[i] - coef * eps.v[i]) * inv_sqrt_alpha;
    if (t > 0) out.values[i] += sigma * z.v[i];
  }
  return out;
}

BoxSet reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                    const PreparedCondition& c, std::mt19937_64& rng) {
  return reverse_step(model, s, x_next, t, c, gaussian(x_next.count, x_next.dim, rng));
}

double ula_step_size(const NoiseSchedule& s, int t) {
  s.check_step(t);
  return 0.1 * (1.0 - s.alpha_bar[static_cast<std::size_t>(t)]);
}

std::vector<BoxSet> ula_neighbors(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x, int t,
                                  const PreparedCondition& c, std::size_t n_p, double eta, int k, std::uint64_t seed) {
  if (n_p < 1) throw Error("invalid-argument", "need at least one neighbor");
  s.check_step(t);
  std::vector<BoxSet> out(n_p, x);
  if (eta == 0.0 || k <= 0) return out;
  const double noise_std = std::sqrt(1.0 - s.alpha_bar[static_cast<std::size_t>(t)]);
  const double root_eta = std::sqrt(eta);
  // Each chain owns its stream, so the split across threads never changes results.
  parallel_for(n_p, [&](std::size_t n) {
    auto rng = rng_stream(seed, {kStreamUla, static_cast<std::uint64_t>(t), n});
    BoxSet& cur = out[n];
    for (int step = 0; step < k; ++step) {
      const Mat eps = model.predict(cur, t, c);
      const Mat z = gaussian(cur.count, cur.dim, rng);
      for (std::size_t i = 0; i < cur.values.size(); ++i)
        cur.values[i] += 0.5 * eta * (-eps.v[i] / noise_std) + root_eta * z.v[i];
    }
  });
  return out;
}

BoxSet initial_state(std::size_t count, std::size_t dim, const std::vector<std::uint8_t>& contact_mask,
                     std::uint64_t seed) {
  auto rng = rng_stream(seed, {kStreamInit});
  BoxSet x(count, dim);
  x.values = gaussian(count, dim, rng).v;
  if (contact_mask.size() == count) x.contact_mask = contact_mask;
  return x;
}

Mat chain_noise(std::size_t count, std::size_t dim, int t, std::uint64_t seed) {
  auto rng = rng_stream(seed, {kStreamChain, static_cast<std::uint64_t>(t)});
  return gaussian(count, dim, rng);
}

BoxSet sample_unguided(const NoisePredictor& model, const NoiseSchedule& s, BoxSet x, const PreparedCondition& c,
                       std::uint64_t seed) {
  for (int t = s.steps - 1; t >= 0; --t) x = reverse_step(model, s, x, t, c, chain_noise(x.count, x.dim, t, seed));
  return x;
}

}  // namespace geoknit
