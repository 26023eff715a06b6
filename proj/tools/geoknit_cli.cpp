#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geoknit/diffusion/checkpoint.hpp"
#include "geoknit/diffusion/train.hpp"
#include "geoknit/error.hpp"
#include "geoknit/guidance/guided_sampling.hpp"
#include "geoknit/metrics/metrics.hpp"
#include "geoknit/pipeline/heatmap.hpp"
#include "geoknit/pipeline/json_io.hpp"
#include "geoknit/pipeline/normalize.hpp"
#include "geoknit/pipeline/parallel.hpp"

namespace fs = std::filesystem;
using namespace geoknit;

namespace {

constexpr int kExitMalformed = 2;
constexpr int kExitNumerical = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

/// A part file may hold a PartModel or a whole sample; `role` picks the part.
PartModel read_part_or_sample(const std::string& path, const char* role) {
  const auto j = read_json_file(path);
  if (j.is_object() && j.contains(role)) return part_from_json(j.at(role));
  return part_from_json(j);
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

struct SynthArgs {
  std::string families = "peg_socket,flange_ring,bracket_plate";
  std::size_t count = 100;
  std::string out;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
  std::vector<Family> fams;
  for (const auto& f : split_list(a.families)) fams.push_back(family_from_string(f));
  auto samples = synth_dataset(fams, a.count, a.seed);
  for (auto& s : samples) s = normalize(s).first;
  write_dataset(a.out, samples);
  std::cout << "wrote " << samples.size() << " samples to " << a.out << '\n';
  return 0;
}

struct AnnotateArgs {
  std::vector<std::string> pair;
  double delta = kDefaultDelta;
  std::string out;
};

int run_annotate(const AnnotateArgs& a) {
  const PartModel pa = read_part_or_sample(a.pair.at(0), "condition");
  const PartModel pb = read_part_or_sample(a.pair.at(1), "target");
  const ContactReport r = find_contacts(pa, pb, a.delta);
  const auto j = report_to_json(r);
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    ensure_parent(a.out);
    write_json_file(a.out, j);
  }
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string out;
  int epochs = 50;
  std::uint64_t seed = 0;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::string optimizer = "sgd";
};

int run_train(const TrainArgs& a) {
  const auto samples = read_dataset(a.data);
  std::vector<TrainingExample> data;
  std::map<std::size_t, std::size_t> face_counts;
  for (const auto& s : samples) {
    data.push_back(make_example(s.target, s.condition, s.prompt));
    ++face_counts[s.target.size()];
  }
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.model.seed = a.seed;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  if (a.optimizer == "adam") {
    cfg.optimizer = Optimizer::adam;
  } else if (a.optimizer != "sgd") {
    throw Error("invalid-argument", "optimizer must be sgd or adam");
  }
  cfg.on_epoch = [](int e, double loss) { std::cerr << "epoch " << e << " loss " << loss << '\n'; };
  TrainResult res = train_denoiser(std::move(data), cfg);

  // Most frequent target size, smallest on ties.
  std::size_t faces = 0, best = 0;
  for (const auto& [n, c] : face_counts)
    if (c > best) {
      best = c;
      faces = n;
    }
  ensure_parent(a.out);
  save_checkpoint(a.out, Checkpoint{std::move(res.model), cfg.schedule, faces, res.epoch_loss});
  std::ofstream csv(sibling(a.out, ".loss.csv"));
  if (!csv) throw Error("io-error", "cannot write loss log");
  csv << "epoch,loss\n";
  csv.precision(17);
  for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) csv << e << ',' << res.epoch_loss[e] << '\n';
  return 0;
}

struct SampleArgs {
  std::string model;
  std::string cond;
  std::string prompt;
  bool guided = false;
  std::size_t np = 6;
  double omega = 1.0;
  std::string steps = "110,90,70,50";
  std::uint64_t seed = 0;
  std::size_t faces = 0;
  std::string out;
  std::string trace;
};

int run_sample(const SampleArgs& a) {
  const Checkpoint ck = load_checkpoint(a.model);
  const PartModel cond = read_part_or_sample(a.cond, "condition");
  GenerationConfig cfg;
  cfg.guided = a.guided;
  cfg.guidance.n_p = a.np;
  cfg.guidance.omega_u = a.omega;
  cfg.guidance.guidance_steps.clear();
  for (const auto& s : split_list(a.steps)) {
    try {
      cfg.guidance.guidance_steps.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw Error("invalid-argument", "bad guidance step '" + s + "'");
    }
  }
  cfg.num_faces = a.faces > 0 ? a.faces : ck.num_faces;
  std::string prompt = a.prompt.empty() ? cond.prompt : a.prompt;
  const GenerationResult res = generate(ck.model, ck.schedule, cond, prompt, cfg, a.seed);
  ensure_parent(a.out);
  write_part(a.out, res.model);
  const std::string trace_path = a.trace.empty() ? sibling(a.out, ".trace.jsonl") : a.trace;
  std::ofstream tr(trace_path);
  if (!tr) throw Error("io-error", "cannot write " + trace_path);
  write_trace(tr, res.trace);
  return 0;
}

struct EvaluateArgs {
  std::string gen;
  std::string ref;
  std::string out;
  double delta = kDefaultDelta;
  std::uint64_t seed = 0;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto files = json_files_in(a.gen);
  if (files.empty()) throw Error("malformed-input", "no generated models in " + a.gen);
  std::vector<SampleMetrics> rows(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    const fs::path gp(files[i]);
    const fs::path rp = fs::path(a.ref) / gp.filename();
    if (!fs::exists(rp)) throw Error("malformed-input", "no reference sample " + rp.string());
    const PartModel gen = read_part_or_sample(gp.string(), "target");
    const AssemblySample ref = read_sample(rp.string());
    rows[i] = evaluate_sample(gp.stem().string(), gen, ref.condition, ref.target, a.delta, a.seed);
  });
  const EvalReport report = aggregate(std::move(rows));
  ensure_parent(a.out);
  std::ofstream js(a.out);
  if (!js) throw Error("io-error", "cannot write " + a.out);
  write_report_json(js, report);
  std::ofstream csv(sibling(a.out, ".csv"));
  if (!csv) throw Error("io-error", "cannot write report CSV");
  write_report_csv(csv, report);
  std::cout << "cd " << report.cd << " pr " << report.pr << " iv " << report.iv << " vr " << report.vr << '\n';
  return 0;
}

struct HeatmapArgs {
  std::string models;
  std::string out;
  int pixels = 64;
};

int run_heatmap(const HeatmapArgs& a) {
  std::vector<PartModel> models;
  for (const auto& f : json_files_in(a.models)) models.push_back(read_part_or_sample(f, "target"));
  const OccupancyGrid grid = top_down_occupancy(models, a.pixels);
  ensure_parent(a.out);
  std::ofstream out(a.out);
  if (!out) throw Error("io-error", "cannot write " + a.out);
  write_heatmap_svg(out, grid);
  return 0;
}

int exit_code_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "numerical-failure" || c == "diverged") return kExitNumerical;
  if (c == "malformed-input" || c == "io-error" || c == "bad-checkpoint" || c == "invalid-argument" ||
      c == "invalid-model" || c == "infeasible-params" || c == "no-condition-contacts" || c == "empty-model")
    return kExitMalformed;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoknit: contact-guided part generation toolkit"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth-data", "generate a synthetic assembly dataset");
  synth->add_option("--families", sa.families, "comma-separated family names");
  synth->add_option("--count", sa.count, "number of samples");
  synth->add_option("--out", sa.out, "output directory")->required();
  synth->add_option("--seed", sa.seed);

  AnnotateArgs aa;
  auto* annotate = app.add_subcommand("annotate", "label contact faces between two parts");
  annotate->add_option("--pair", aa.pair, "two part files")->required()->expected(2);
  annotate->add_option("--delta", aa.delta, "contact tolerance");
  annotate->add_option("--out", aa.out, "report file (stdout if omitted)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train the denoiser");
  train->add_option("--data", ta.data, "dataset directory")->required();
  train->add_option("--out", ta.out, "checkpoint path")->required();
  train->add_option("--epochs", ta.epochs);
  train->add_option("--seed", ta.seed);
  train->add_option("--batch", ta.batch);
  train->add_option("--lr", ta.lr);
  train->add_option("--optimizer", ta.optimizer, "sgd or adam");

  SampleArgs sm;
  auto* sample = app.add_subcommand("sample", "generate one part for a condition");
  sample->add_option("--model", sm.model, "checkpoint")->required();
  sample->add_option("--cond", sm.cond, "condition part or sample file")->required();
  sample->add_option("--prompt", sm.prompt);
  sample->add_flag("--guided", sm.guided, "enable contact guidance");
  sample->add_option("--np", sm.np, "candidates per guided step");
  sample->add_option("--omega", sm.omega, "regularizer weight");
  sample->add_option("--steps", sm.steps, "comma-separated guidance steps");
  sample->add_option("--seed", sm.seed);
  sample->add_option("--faces", sm.faces, "face count (checkpoint default if 0)");
  sample->add_option("--out", sm.out, "generated part file")->required();
  sample->add_option("--trace", sm.trace, "trace file (default <out>.trace.jsonl)");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "score generated parts against references");
  evaluate->add_option("--gen", ea.gen, "generated parts directory")->required();
  evaluate->add_option("--ref", ea.ref, "reference samples directory")->required();
  evaluate->add_option("--out", ea.out, "report JSON path")->required();
  evaluate->add_option("--delta", ea.delta);
  evaluate->add_option("--seed", ea.seed);

  HeatmapArgs ha;
  auto* heatmap = app.add_subcommand("heatmap", "top-down occupancy heatmap of a model batch");
  heatmap->add_option("--models", ha.models, "directory of parts or samples")->required();
  heatmap->add_option("--out", ha.out, "SVG path")->required();
  heatmap->add_option("--pixels", ha.pixels);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(sa);
    if (*annotate) return run_annotate(aa);
    if (*train) return run_train(ta);
    if (*sample) return run_sample(sm);
    if (*evaluate) return run_evaluate(ea);
    if (*heatmap) return run_heatmap(ha);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  }
  return 1;
}
