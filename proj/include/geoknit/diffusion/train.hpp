#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoknit/diffusion/denoiser.hpp"
#include "geoknit/diffusion/schedule.hpp"

namespace geoknit {

struct TrainingExample {
  BoxSet target;
  ConditionSequence condition;
};

/// min(M, n_faces, cond_contacts): leading rows that carry the contact-slot
/// embedding.
std::size_t contact_slot_count(std::size_t n_faces, std::size_t cond_contacts);

/// Target boxes with the target's contact faces moved to the front (index
/// order kept within both groups) and the leading contact_slot_count rows
/// flagged.
TrainingExample make_example(const PartModel& target, const PartModel& cond, const std::string& prompt);

enum class Optimizer { sgd_momentum, adam };

struct TrainConfig {
  ModelConfig model;
  NoiseSchedule schedule = NoiseSchedule::linear();
  int epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  Optimizer optimizer = Optimizer::sgd_momentum;
  std::uint64_t seed = 0;
  /// Called after each epoch with (epoch, mean loss).
  std::function<void(int, double)> on_epoch;
};

struct TrainResult {
  Denoiser model;
  std::vector<double> epoch_loss;
};

/// Minimizes the noise-prediction MSE. The dataset is first put in a
/// canonical order (sorted by content hash) so the result does not depend on
/// input order; each step draws batch_size examples with replacement, and an
/// epoch is ceil(|data| / batch_size) steps. Throws Error "empty-dataset" or
/// "diverged".
TrainResult train_denoiser(std::vector<TrainingExample> data, const TrainConfig& config);

/// Mean squared noise-prediction error of the model over the examples at
/// random (t, noise) draws from the given seed.
double evaluate_loss(const Denoiser& model, const NoiseSchedule& s, const std::vector<TrainingExample>& data,
                     std::uint64_t seed, int draws_per_example = 1);

}  // namespace geoknit
