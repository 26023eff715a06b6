#include "geoknit/diffusion/denoiser.hpp"

#include <cmath>
#include <random>

#include "geoknit/diffusion/text_embed.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

ConditionSequence make_condition(const PartModel& cond, const std::string& prompt) {
  ConditionSequence c;
  c.text = embed_text(prompt);
  c.cond = BoxSet(cond.faces.size(), 6);
  for (std::size_t i = 0; i < cond.faces.size(); ++i) c.cond.set_box(i, cond.faces[i].box);
  for (int i : cond.contact_indices) c.cond.contact_mask.at(static_cast<std::size_t>(i)) = 1;
  return c;
}

Mat timestep_features(int t) {
  constexpr std::size_t half = 32;
  Mat f(1, 2 * half);
  for (std::size_t k = 0; k < half; ++k) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half));
    f.v[k] = std::sin(static_cast<double>(t) * freq);
    f.v[half + k] = std::cos(static_cast<double>(t) * freq);
  }
  return f;
}

namespace {

Mat rows_of(const BoxSet& x) {
  Mat m(x.count, x.dim);
  m.v = x.values;
  return m;
}

std::string blk(std::size_t b, const char* name) { return "block" + std::to_string(b) + "." + name; }

}  // namespace

Denoiser::Denoiser(const ModelConfig& config) : config_(config) {
  if (config.data_dim == 0 || config.width == 0) throw Error("invalid-argument", "model dimensions must be positive");
  std::mt19937_64 rng(config.seed);
  const std::size_t d = config.width, h = config.mlp_hidden;
  auto lin = [&](const std::string& name, std::size_t in, std::size_t out) {
    params_.add(name + ".w", in, out, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    params_.add(name + ".b", 1, out, 0.0, rng);
  };
  lin("in", config.data_dim, d);
  lin("time1", 64, d);
  lin("time2", d, d);
  params_.add("contact_slot", 1, d, 0.1, rng);
  lin("text", kTextDim, d);
  lin("cond1", config.cond_dim, d);
  lin("cond2", d, d);
  params_.add("cond_contact", 1, d, 0.1, rng);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t b = 0; b < config.blocks; ++b) {
    for (const char* n : {"sa_q", "sa_k", "sa_v", "sa_o", "ca_q", "ca_k", "ca_v", "ca_o"})
      params_.add(blk(b, n), d, d, s, rng);
    lin(blk(b, "mlp1"), d, h);
    lin(blk(b, "mlp2"), h, d);
  }
  params_.add("out.w", d, config.data_dim, 0.01, rng);
  params_.add("out.b", 1, config.data_dim, 0.0, rng);
}

void Denoiser::encode_condition(Graph& g, const ConditionSequence& c, std::vector<Graph::Id>& keys,
                                std::vector<Graph::Id>& values, ParamStore& p) const {
  auto P = [&](const std::string& n) { return g.param(p.get(n)); };
  Graph::Id seq = g.add_row(g.matmul(g.constant(c.text), P("text.w")), P("text.b"));
  if (c.cond.count > 0) {
    if (c.cond.dim != config_.cond_dim) throw Error("shape-mismatch", "condition box width");
    Graph::Id e = g.add_row(g.matmul(g.constant(rows_of(c.cond)), P("cond1.w")), P("cond1.b"));
    e = g.add_row(g.matmul(g.silu(e), P("cond2.w")), P("cond2.b"));
    e = g.add_row_masked(e, P("cond_contact"), c.cond.contact_mask);
    seq = g.concat_rows(seq, e);
  }
  keys.clear();
  values.clear();
  for (std::size_t b = 0; b < config_.blocks; ++b) {
    keys.push_back(g.matmul(seq, P(blk(b, "ca_k"))));
    values.push_back(g.matmul(seq, P(blk(b, "ca_v"))));
  }
}

Graph::Id Denoiser::trunk(Graph& g, const BoxSet& x, int t, const std::vector<Graph::Id>& keys,
                          const std::vector<Graph::Id>& values, ParamStore& p) const {
  if (x.dim != config_.data_dim) throw Error("shape-mismatch", "box set width differs from the model");
  if (x.count == 0) throw Error("shape-mismatch", "empty box set");
  auto P = [&](const std::string& n) { return g.param(p.get(n)); };
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config_.width));

  Graph::Id temb = g.add_row(g.matmul(g.constant(timestep_features(t)), P("time1.w")), P("time1.b"));
  temb = g.add_row(g.matmul(g.silu(temb), P("time2.w")), P("time2.b"));

  Graph::Id h;
  if (config_.use_input) {
    h = g.add_row(g.matmul(g.constant(rows_of(x)), P("in.w")), P("in.b"));
  } else {
    h = g.constant(Mat(x.count, config_.width));
  }
  h = g.add_row(h, temb);
  h = g.add_row_masked(h, P("contact_slot"), x.contact_mask);

  auto attend = [&](Graph::Id q, Graph::Id k, Graph::Id v) {
    return g.matmul(g.softmax_rows(g.scale(g.matmul_nt(q, k), inv_sqrt_d)), v);
  };
  for (std::size_t b = 0; b < config_.blocks; ++b) {
    const Graph::Id sa = attend(g.matmul(h, P(blk(b, "sa_q"))), g.matmul(h, P(blk(b, "sa_k"))),
                                g.matmul(h, P(blk(b, "sa_v"))));
    h = g.add(h, g.matmul(sa, P(blk(b, "sa_o"))));
    const Graph::Id ca = attend(g.matmul(h, P(blk(b, "ca_q"))), keys[b], values[b]);
    h = g.add(h, g.matmul(ca, P(blk(b, "ca_o"))));
    Graph::Id m = g.add_row(g.matmul(h, P(blk(b, "mlp1.w"))), P(blk(b, "mlp1.b")));
    m = g.add_row(g.matmul(g.silu(m), P(blk(b, "mlp2.w"))), P(blk(b, "mlp2.b")));
    h = g.add(h, m);
  }
  return g.add_row(g.matmul(h, P("out.w")), P("out.b"));
}

Graph::Id Denoiser::forward(Graph& g, const BoxSet& x, int t, const ConditionSequence& c) {
  std::vector<Graph::Id> keys, values;
  encode_condition(g, c, keys, values, params_);
  return trunk(g, x, t, keys, values, params_);
}

PreparedCondition Denoiser::prepare(ConditionSequence c) const {
  PreparedCondition out;
  Graph g;
  std::vector<Graph::Id> keys, values;
  encode_condition(g, c, keys, values, params_);
  for (std::size_t b = 0; b < keys.size(); ++b) {
    out.keys.push_back(g.value(keys[b]));
    out.values.push_back(g.value(values[b]));
  }
  out.sequence = std::move(c);
  return out;
}

Mat Denoiser::predict(const BoxSet& x, int t, const PreparedCondition& c) const {
  Graph g;
  std::vector<Graph::Id> keys, values;
  if (c.keys.size() == config_.blocks && c.values.size() == config_.blocks) {
    for (std::size_t b = 0; b < config_.blocks; ++b) {
      keys.push_back(g.constant(c.keys[b]));
      values.push_back(g.constant(c.values[b]));
    }
  } else {
    encode_condition(g, c.sequence, keys, values, params_);
  }
  return g.value(trunk(g, x, t, keys, values, params_));
}

}  // namespace geoknit
