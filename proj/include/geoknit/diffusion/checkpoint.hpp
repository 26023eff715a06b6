#pragma once

#include <string>
#include <vector>

#include "geoknit/diffusion/denoiser.hpp"
#include "geoknit/diffusion/schedule.hpp"

namespace geoknit {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Denoiser model;
  NoiseSchedule schedule = NoiseSchedule::linear();
  std::size_t num_faces = 6;  // default generated face count
  std::vector<double> epoch_loss;
};

/// JSON container with format tag, version, model and schedule settings and
/// every parameter tensor.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws Error "bad-checkpoint" on a wrong format or version, missing or
/// mis-shaped parameters.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace geoknit
