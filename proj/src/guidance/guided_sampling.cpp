#include "geoknit/guidance/guided_sampling.hpp"

#include <algorithm>
#include <cmath>

#include "geoknit/brep/sew.hpp"
#include "geoknit/diffusion/train.hpp"
#include "geoknit/error.hpp"
#include "geoknit/fgw/fgw.hpp"
#include "geoknit/pipeline/parallel.hpp"
#include "json.hpp"

namespace geoknit {

double candidate_score(const BoxSet& candidate, const BoxSet& guide, const BoxSet& x_tilde,
                       const GuidanceConfig& config) {
  double s = d_geo(candidate, guide);
  if (config.omega_u != 0.0) s += config.omega_u * d_reg(candidate, x_tilde, config.lambda);
  return s;
}

std::size_t argmin_score(const std::vector<double>& scores) {
  if (scores.empty()) throw Error("empty-set", "no candidates to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best]) best = i;
  return best;
}

std::vector<BoxSet> guided_candidates(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_tilde, int t,
                                      const PreparedCondition& c, const GuidanceConfig& config, std::uint64_t seed) {
  if (config.n_p < 1) throw Error("invalid-argument", "n_p must be at least 1");
  std::vector<BoxSet> out{x_tilde};
  if (config.n_p == 1) return out;
  const double eta = config.ula_scale * (1.0 - s.alpha_bar[static_cast<std::size_t>(t)]);
  for (auto& e : ula_neighbors(model, s, x_tilde, t, c, config.n_p - 1, eta, config.ula_steps, seed))
    out.push_back(std::move(e));
  return out;
}

BoxSet guided_reverse_step(const NoisePredictor& model, const NoiseSchedule& s, const BoxSet& x_next, int t,
                           const PreparedCondition& c, const ConditionGeometry& cond, const GuidanceConfig& config,
                           std::uint64_t seed, StepTrace* trace) {
  BoxSet x_tilde = reverse_step(model, s, x_next, t, c, chain_noise(x_next.count, x_next.dim, t, seed));
  if (std::find(config.guidance_steps.begin(), config.guidance_steps.end(), t) == config.guidance_steps.end())
    return x_tilde;

  const GuidingSample gs = predict_guiding_sample(x_tilde, cond, t, s.steps, config);
  std::vector<BoxSet> cands = guided_candidates(model, s, x_tilde, t, c, config, seed);
  std::vector<double> scores(cands.size(), 0.0);
  if (gs.guide.count > 0)
    parallel_for(cands.size(), [&](std::size_t n) { scores[n] = candidate_score(cands[n], gs.guide, x_tilde, config); });
  const std::size_t best = argmin_score(scores);
  if (trace) {
    trace->t = t;
    trace->scores = scores;
    trace->chosen = best;
    trace->pairs = gs.pairs;
    trace->cost_before = gs.cost_before;
    trace->cost_after = gs.cost_after;
  }
  return std::move(cands[best]);
}

PartModel decode_part(const BoxSet& x, const std::string& prompt) {
  if (x.dim != 6) throw Error("shape-mismatch", "decode_part needs 6-value box rows");
  PartModel raw;
  raw.prompt = prompt;
  for (std::size_t i = 0; i < x.count; ++i) {
    if (!std::all_of(x.row(i), x.row(i) + 6, [](double v) { return std::isfinite(v); }))
      throw Error("numerical-failure", "non-finite box in the final state");
    raw.faces.push_back(make_face_entry(decode_face(decodable_box(x.box(i)), FaceKind::planar)));
  }
  for (std::size_t i = 0; i < x.count; ++i)
    if (x.contact_mask[i]) raw.contact_indices.push_back(static_cast<int>(i));
  PartModel part = sew_faces(raw);
  orient_faces(part);
  return part;
}

GenerationResult generate(const NoisePredictor& model, const NoiseSchedule& s, const PartModel& cond,
                          const std::string& prompt, const GenerationConfig& config, std::uint64_t seed) {
  if (config.num_faces == 0) throw Error("invalid-argument", "num_faces must be positive");
  GuidanceConfig gc = config.guidance;
  if (!config.guided) gc.guidance_steps.clear();
  for (int t : gc.guidance_steps)
    if (t < 0 || t >= s.steps) throw Error("invalid-argument", "guidance step outside the chain");

  const std::size_t k = contact_slot_count(config.num_faces, cond.contact_indices.size());
  std::vector<std::uint8_t> mask(config.num_faces, 0);
  for (std::size_t i = 0; i < k; ++i) mask[i] = 1;

  const PreparedCondition c = model.prepare(make_condition(cond, prompt));
  ConditionGeometry geom;
  if (!gc.guidance_steps.empty()) geom = prepare_condition_geometry(cond);

  GenerationResult res;
  BoxSet x = initial_state(config.num_faces, 6, mask, seed);
  for (int t = s.steps - 1; t >= 0; --t) {
    StepTrace st;
    x = guided_reverse_step(model, s, x, t, c, geom, gc, seed, &st);
    if (!st.scores.empty()) res.trace.push_back(std::move(st));
  }
  res.final_state = x;
  res.model = decode_part(x, prompt);
  return res;
}

void write_trace(std::ostream& out, const std::vector<StepTrace>& trace) {
  for (const auto& st : trace) {
    nlohmann::json j;
    j["t"] = st.t;
    j["scores"] = st.scores;
    j["chosen"] = st.chosen;
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < st.pairs.size(); ++i)
      pairs.push_back({{"slot", st.pairs[i].first},
                       {"cond_face", st.pairs[i].second},
                       {"c_before", st.cost_before[i]},
                       {"c_after", st.cost_after[i]}});
    j["pairs"] = std::move(pairs);
    out << j.dump() << '\n';
  }
}

}  // namespace geoknit
