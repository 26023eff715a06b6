#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geoknit/diffusion/sampler.hpp"
#include "geoknit/guidance/config.hpp"
#include "geoknit/guidance/predictor.hpp"

namespace geoknit {

/// One guided step as recorded in the trace.
struct StepTrace {
  int t = 0;
  std::vector<double> scores;  // composite score per candidate
  std::size_t chosen = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> cost_before;
  std::vector<double> cost_after;
};

/// Composite score d_geo(candidate, guide) + omega_u d_reg(candidate, x_tilde).
double candidate_score(const BoxSet& candidate, const BoxSet& guide, const BoxSet& x_tilde, const GuidanceConfig& config);

/// Index of the lowest score, first one on ties.
std::size_t argmin_score(const std::vector<double>& scores);

/// Candidate set of a guided step: x_tilde itself followed by n_p - 1 ULA
/// neighbours of it.
std::vector<BoxSet> guided_candidates(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_tilde, int t,
                                      const PreparedCondition& c, const GuidanceConfig& config, std::uint64_t seed);

/// x_tilde = reverse_step(x_next) with chain_noise(seed, t); on guidance
/// steps, returns the best-scoring candidate against the guiding sample.
BoxSet guided_reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                           const PreparedCondition& c, const ConditionGeometry& cond, const GuidanceConfig& config,
                           std::uint64_t seed, StepTrace* trace = nullptr);

struct GenerationConfig {
  GuidanceConfig guidance;
  bool guided = true;  // false: empty guidance-step set
  std::size_t num_faces = 6;
};

struct GenerationResult {
  PartModel model;
  BoxSet final_state;
  std::vector<StepTrace> trace;
};

/// Full reverse chain from x_T, boxes decoded as planar faces, sewn and
/// oriented. contact_indices are the contact slots.
GenerationResult generate(const NoisePredictor& model, const NoiseSchedule& s, const PartModel& cond,
                          const std::string& prompt, const GenerationConfig& config, std::uint64_t seed);

/// Decodes a final diffusion state into a part (planar faces, sewn, oriented).
PartModel decode_part(const BoxSet& x, const std::string& prompt);

/// One JSON object per line.
void write_trace(std::ostream& out, const std::vector<StepTrace>& trace);

}  // namespace geoknit
