#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <vector>

#include "geoknit/diffusion/denoiser.hpp"
#include "geoknit/diffusion/schedule.hpp"

namespace geoknit {

/// Independent generator for (seed, keys...). Streams with different keys
/// never share state, so work can be split across threads freely.
std::mt19937_64 rng_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

enum StreamTag : std::uint64_t {
  kStreamInit = 1,
  kStreamChain = 2,
  kStreamUla = 3,
  kStreamTrain = 4,
  kStreamSurface = 5,
  kStreamSynth = 6,
};

/// count x dim standard normal draws.
Mat gaussian(std::size_t count, std::size_t dim, std::mt19937_64& rng);

/// sqrt(abar_t) x0 + sqrt(1 - abar_t) noise. Throws Error "invalid-step".
BoxSet forward_diffuse(const NoiseSchedule& s, const BoxSet& x0, int t, const Mat& noise);

/// DDPM ancestral step x_{t+1} -> x_t with posterior variance; z is ignored
/// at t = 0.
BoxSet reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                    const PreparedCondition& c, const Mat& z);
BoxSet reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                    const PreparedCondition& c, std::mt19937_64& rng);

/// Default ULA step size 0.1 (1 - abar_t).
double ula_step_size(const NoiseSchedule& s, int t);

/// n_p chains of k steps x <- x + (eta/2) score + sqrt(eta) z starting at x,
/// score = -eps(x, t, c) / sqrt(1 - abar_t). Chain n draws from
/// rng_stream(seed, {kStreamUla, t, n}).
std::vector<BoxSet> ula_neighbors(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x, int t,
                                  const PreparedCondition& c, std::size_t n_p, double eta, int k, std::uint64_t seed);

/// x_T for a chain: rng_stream(seed, {kStreamInit}).
BoxSet initial_state(std::size_t count, std::size_t dim, const std::vector<std::uint8_t>& contact_mask,
                     std::uint64_t seed);

/// Noise used by the chain step producing x_t: rng_stream(seed, {kStreamChain, t}).
Mat chain_noise(std::size_t count, std::size_t dim, int t, std::uint64_t seed);

/// Plain reverse chain from x_T down to x_0 with chain_noise.
BoxSet sample_unguided(const NoisePredictor& model, const NoiseSchedule& s, BoxSet x_T, const PreparedCondition& c,
                       std::uint64_t seed);

}  // namespace geoknit
