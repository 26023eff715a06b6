#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoknit/brep/boxset.hpp"
#include "geoknit/brep/face.hpp"
#include "geoknit/diffusion/graph.hpp"

namespace geoknit {

inline constexpr std::size_t kContactSlots = 10;  // M

/// Conditioning inputs: prompt embedding plus the condition part's face
/// boxes, with its designated contact faces flagged in cond.contact_mask.
struct ConditionSequence {
  Mat text;
  BoxSet cond;
};

ConditionSequence make_condition(const PartModel& cond, const std::string& prompt);

/// A condition plus whatever the predictor precomputes from it once per chain.
struct PreparedCondition {
  ConditionSequence sequence;
  std::vector<Mat> keys;    // per block cross-attention keys
  std::vector<Mat> values;  // per block cross-attention values
};

/// epsilon_theta(x_t, t, c).
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  virtual PreparedCondition prepare(ConditionSequence c) const { return {std::move(c), {}, {}}; }
  /// Returns a matrix shaped like x (count x dim).
  virtual Mat predict(const BoxSet& x, int t, const PreparedCondition& c) const = 0;
};

struct ModelConfig {
  std::size_t data_dim = 6;
  std::size_t width = 64;  // D
  std::size_t blocks = 2;
  std::size_t mlp_hidden = 128;
  std::size_t cond_dim = 6;
  bool use_input = true;  // false: output depends on t and c only
  std::uint64_t seed = 0;
};

/// Set network: input projection plus time and contact-slot embeddings, then
/// blocks of self-attention, cross-attention to c and an MLP, all residual.
class Denoiser : public NoisePredictor {
 public:
  Denoiser() = default;
  explicit Denoiser(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  PreparedCondition prepare(ConditionSequence c) const override;
  Mat predict(const BoxSet& x, int t, const PreparedCondition& c) const override;

  /// Builds the full forward pass (condition encoder included) on g for
  /// training; returns the output node.
  Graph::Id forward(Graph& g, const BoxSet& x, int t, const ConditionSequence& c);

 private:
  void encode_condition(Graph& g, const ConditionSequence& c, std::vector<Graph::Id>& keys,
                        std::vector<Graph::Id>& values, ParamStore& p) const;
  Graph::Id trunk(Graph& g, const BoxSet& x, int t, const std::vector<Graph::Id>& keys,
                  const std::vector<Graph::Id>& values, ParamStore& p) const;

  ModelConfig config_;
  mutable ParamStore params_;
};

/// Sinusoidal features of t, 64 wide.
Mat timestep_features(int t);

}  // namespace geoknit
