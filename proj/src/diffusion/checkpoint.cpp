#include "geoknit/diffusion/checkpoint.hpp"

#include <fstream>

#include "geoknit/error.hpp"
#include "json.hpp"

namespace geoknit {

using nlohmann::json;

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const ModelConfig& mc = ckpt.model.config();
  json j;
  j["format"] = "geoknit-denoiser";
  j["version"] = kCheckpointVersion;
  j["model"] = {{"data_dim", mc.data_dim}, {"width", mc.width},         {"blocks", mc.blocks},
                {"mlp_hidden", mc.mlp_hidden}, {"cond_dim", mc.cond_dim}, {"use_input", mc.use_input},
                {"seed", mc.seed},           {"contact_slots", kContactSlots}};
  j["schedule"] = {{"steps", ckpt.schedule.steps},
                   {"beta_start", ckpt.schedule.beta_start},
                   {"beta_end", ckpt.schedule.beta_end}};
  j["num_faces"] = ckpt.num_faces;
  j["epoch_loss"] = ckpt.epoch_loss;
  json params = json::array();
  for (const auto& e : ckpt.model.params().entries())
    params.push_back({{"name", e.name}, {"rows", e.value.rows}, {"cols", e.value.cols}, {"data", e.value.v}});
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw Error("io-error", "write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot read " + path);
  json j;
  try {
    in >> j;
    if (j.at("format") != "geoknit-denoiser") throw Error("bad-checkpoint", "not a denoiser checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) throw Error("bad-checkpoint", "unsupported version");
    const json& m = j.at("model");
    if (m.at("contact_slots").get<std::size_t>() != kContactSlots)
      throw Error("bad-checkpoint", "contact slot count differs from this build");
    ModelConfig mc;
    mc.data_dim = m.at("data_dim").get<std::size_t>();
    mc.width = m.at("width").get<std::size_t>();
    mc.blocks = m.at("blocks").get<std::size_t>();
    mc.mlp_hidden = m.at("mlp_hidden").get<std::size_t>();
    mc.cond_dim = m.at("cond_dim").get<std::size_t>();
    mc.use_input = m.at("use_input").get<bool>();
    mc.seed = m.at("seed").get<std::uint64_t>();
    const json& s = j.at("schedule");
    Checkpoint ck{Denoiser(mc),
                  NoiseSchedule::linear(s.at("steps").get<int>(), s.at("beta_start").get<double>(),
                                        s.at("beta_end").get<double>()),
                  j.at("num_faces").get<std::size_t>(), j.at("epoch_loss").get<std::vector<double>>()};
    const json& params = j.at("params");
    auto& entries = ck.model.params().entries();
    if (params.size() != entries.size()) throw Error("bad-checkpoint", "parameter count mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const json& p = params[i];
      auto& e = entries[i];
      if (p.at("name").get<std::string>() != e.name || p.at("rows").get<std::size_t>() != e.value.rows ||
          p.at("cols").get<std::size_t>() != e.value.cols)
        throw Error("bad-checkpoint", "parameter shape mismatch at " + e.name);
      auto data = p.at("data").get<std::vector<double>>();
      if (data.size() != e.value.v.size()) throw Error("bad-checkpoint", "parameter size mismatch at " + e.name);
      e.value.v = std::move(data);
    }
    return ck;
  } catch (const json::exception& ex) {
    throw Error("bad-checkpoint", ex.what());
  }
}

}  // namespace geoknit
