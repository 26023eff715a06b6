#include "geoknit/diffusion/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "geoknit/diffusion/sampler.hpp"
#include "geoknit/error.hpp"

namespace geoknit {

std::size_t contact_slot_count(std::size_t n_faces, std::size_t cond_contacts) {
  return std::min({kContactSlots, n_faces, cond_contacts});
}

TrainingExample make_example(const PartModel& target, const PartModel& cond, const std::string& prompt) {
  std::vector<std::size_t> order;
  std::vector<char> is_contact(target.faces.size(), 0);
  for (int i : target.contact_indices) is_contact.at(static_cast<std::size_t>(i)) = 1;
  for (std::size_t i = 0; i < target.faces.size(); ++i)
    if (is_contact[i]) order.push_back(i);
  for (std::size_t i = 0; i < target.faces.size(); ++i)
    if (!is_contact[i]) order.push_back(i);

  TrainingExample ex;
  ex.target = BoxSet(order.size(), 6);
  for (std::size_t r = 0; r < order.size(); ++r) ex.target.set_box(r, target.faces[order[r]].box);
  const std::size_t k = contact_slot_count(order.size(), cond.contact_indices.size());
  for (std::size_t r = 0; r < k; ++r) ex.target.contact_mask[r] = 1;
  ex.condition = make_condition(cond, prompt);
  return ex;
}

namespace {

std::uint64_t fnv(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t content_hash(const TrainingExample& e) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv(h, e.target.values.data(), e.target.values.size() * sizeof(double));
  h = fnv(h, e.target.contact_mask.data(), e.target.contact_mask.size());
  h = fnv(h, e.condition.text.v.data(), e.condition.text.v.size() * sizeof(double));
  h = fnv(h, e.condition.cond.values.data(), e.condition.cond.values.size() * sizeof(double));
  h = fnv(h, e.condition.cond.contact_mask.data(), e.condition.cond.contact_mask.size());
  return h;
}

bool byte_less(const TrainingExample& a, const TrainingExample& b) {
  auto cmp = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    const int c = std::memcmp(x.data(), y.data(), x.size() * sizeof(double));
    return c;
  };
  if (int c = cmp(a.target.values, b.target.values)) return c < 0;
  if (int c = cmp(a.condition.cond.values, b.condition.cond.values)) return c < 0;
  if (int c = cmp(a.condition.text.v, b.condition.text.v)) return c < 0;
  if (a.target.contact_mask != b.target.contact_mask) return a.target.contact_mask < b.target.contact_mask;
  return a.condition.cond.contact_mask < b.condition.cond.contact_mask;
}

}  // namespace

TrainResult train_denoiser(std::vector<TrainingExample> data, const TrainConfig& config) {
  if (data.empty()) throw Error("empty-dataset", "train_denoiser needs at least one example");
  if (config.batch_size == 0 || config.epochs < 0) throw Error("invalid-argument", "bad batch size or epoch count");
  for (const auto& e : data)
    if (e.target.dim != config.model.data_dim || e.target.count == 0)
      throw Error("shape-mismatch", "example width differs from the model");

  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  for (std::size_t i = 0; i < data.size(); ++i) keyed.emplace_back(content_hash(data[i]), i);
  std::sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return byte_less(data[x.second], data[y.second]);
  });
  std::vector<TrainingExample> canon;
  canon.reserve(data.size());
  for (const auto& [h, i] : keyed) canon.push_back(std::move(data[i]));

  TrainResult res{Denoiser(config.model), {}};
  Denoiser& model = res.model;
  ParamStore& params = model.params();
  const NoiseSchedule& s = config.schedule;
  auto rng = rng_stream(config.seed, {kStreamTrain});
  std::uniform_int_distribution<std::size_t> pick(0, canon.size() - 1);
  std::uniform_int_distribution<int> pick_t(1, s.steps);
  const std::size_t steps_per_epoch = (canon.size() + config.batch_size - 1) / config.batch_size;

  std::size_t adam_step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_sum = 0.0;
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      params.zero_grad();
      std::vector<std::size_t> batch(config.batch_size);
      std::vector<int> ts(config.batch_size);
      std::vector<Mat> noise(config.batch_size);
      std::size_t elements = 0;
      for (std::size_t b = 0; b < config.batch_size; ++b) {
        batch[b] = pick(rng);
        ts[b] = pick_t(rng);
        const BoxSet& x0 = canon[batch[b]].target;
        noise[b] = gaussian(x0.count, x0.dim, rng);
        elements += x0.values.size();
      }
      double loss = 0.0;
      for (std::size_t b = 0; b < config.batch_size; ++b) {
        const TrainingExample& ex = canon[batch[b]];
        const BoxSet xt = forward_diffuse(s, ex.target, ts[b], noise[b]);
        Graph g;
        const Graph::Id out = model.forward(g, xt, ts[b], ex.condition);
        const Mat& pred = g.value(out);
        Mat seed(pred.rows, pred.cols);
        for (std::size_t i = 0; i < pred.v.size(); ++i) {
          const double r = pred.v[i] - noise[b].v[i];
          loss += r * r;
          seed.v[i] = 2.0 * r / static_cast<double>(elements);
        }
        g.backward(out, seed);
      }
      loss /= static_cast<double>(elements);
      if (!std::isfinite(loss)) throw Error("diverged", "training loss is not finite");

      ++adam_step;
      for (auto& e : params.entries()) {
        if (config.optimizer == Optimizer::sgd_momentum) {
          for (std::size_t i = 0; i < e.value.v.size(); ++i) {
            e.m1.v[i] = config.momentum * e.m1.v[i] + e.grad.v[i];
            e.value.v[i] -= config.learning_rate * e.m1.v[i];
          }
        } else {
          const double b1 = 0.9, b2 = 0.999;
          const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_step));
          const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_step));
          for (std::size_t i = 0; i < e.value.v.size(); ++i) {
            const double g = e.grad.v[i];
            e.m1.v[i] = b1 * e.m1.v[i] + (1.0 - b1) * g;
            e.m2.v[i] = b2 * e.m2.v[i] + (1.0 - b2) * g * g;
            e.value.v[i] -= config.learning_rate * (e.m1.v[i] / c1) / (std::sqrt(e.m2.v[i] / c2) + 1e-8);
          }
        }
      }
      epoch_sum += loss;
    }
    const double mean = epoch_sum / static_cast<double>(steps_per_epoch);
    res.epoch_loss.push_back(mean);
    if (config.on_epoch) config.on_epoch(epoch, mean);
  }
  return res;
}

double evaluate_loss(const Denoiser& model, const NoiseSchedule& s, const std::vector<TrainingExample>& data,
                     std::uint64_t seed, int draws_per_example) {
  if (data.empty()) throw Error("empty-dataset", "evaluate_loss needs examples");
  auto rng = rng_stream(seed, {kStreamTrain, 1});
  std::uniform_int_distribution<int> pick_t(1, s.steps);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ex : data) {
    const PreparedCondition c = model.prepare(ex.condition);
    for (int d = 0; d < draws_per_example; ++d) {
      const int t = pick_t(rng);
      const Mat noise = gaussian(ex.target.count, ex.target.dim, rng);
      const Mat pred = model.predict(forward_diffuse(s, ex.target, t, noise), t, c);
      for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double r = pred.v[i] - noise.v[i];
        sum += r * r;
      }
      n += pred.v.size();
    }
  }
  return sum / static_cast<double>(n);
}

}  // namespace geoknit
