#include "geoknit/pipeline/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "geoknit/error.hpp"

namespace geoknit {

using nlohmann::json;

namespace {

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error("malformed-input", e.what());
  }
}

}  // namespace

json part_to_json(const PartModel& model) {
  json faces = json::array();
  for (const auto& f : model.faces) {
    std::vector<double> grid;
    grid.reserve(f.grid.points.size() * 3);
    for (const auto& p : f.grid.points) grid.insert(grid.end(), {p.x, p.y, p.z});
    const auto bbox = f.box.encode();
    faces.push_back({{"bbox", std::vector<double>(bbox.begin(), bbox.end())},
                     {"grid", std::move(grid)},
                     {"kind", to_string(f.grid.kind)},
                     {"orient", f.grid.orientation}});
  }
  return {{"faces", std::move(faces)}, {"contact_indices", model.contact_indices}, {"prompt", model.prompt}};
}

PartModel part_from_json(const json& j) {
  return guarded([&] {
    PartModel m;
    for (const auto& jf : j.at("faces")) {
      FaceEntry f;
      const auto bbox = jf.at("bbox").get<std::vector<double>>();
      if (bbox.size() != 6) throw Error("malformed-input", "bbox needs 6 values");
      f.box = BoundingBox::decode({bbox[0], bbox[1], bbox[2], bbox[3], bbox[4], bbox[5]});
      const auto grid = jf.at("grid").get<std::vector<double>>();
      if (grid.size() != static_cast<std::size_t>(kGridPoints) * 3)
        throw Error("malformed-input", "grid needs 1024 x 3 values");
      f.grid.points.resize(kGridPoints);
      for (std::size_t i = 0; i < f.grid.points.size(); ++i) f.grid.points[i] = {grid[3 * i], grid[3 * i + 1], grid[3 * i + 2]};
      try {
        f.grid.kind = face_kind_from_string(jf.at("kind").get<std::string>());
      } catch (const Error& e) {
        throw Error("malformed-input", e.what());
      }
      f.grid.orientation = jf.at("orient").get<int>();
      if (f.grid.orientation != 1 && f.grid.orientation != -1) throw Error("malformed-input", "orient must be +1 or -1");
      m.faces.push_back(std::move(f));
    }
    m.contact_indices = j.at("contact_indices").get<std::vector<int>>();
    m.prompt = j.value("prompt", std::string());
    try {
      validate(m);
    } catch (const Error& e) {
      throw Error("malformed-input", e.what());
    }
    return m;
  });
}

json report_to_json(const ContactReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"witnesses_on_a", p.witnesses_on_a}, {"witnesses", p.witnesses}});
  return {{"delta", report.delta}, {"pairs", std::move(pairs)}};
}

ContactReport report_from_json(const json& j) {
  return guarded([&] {
    ContactReport r;
    r.delta = j.at("delta").get<double>();
    for (const auto& jp : j.at("pairs"))
      r.pairs.push_back({jp.at("a").get<int>(), jp.at("b").get<int>(), jp.at("witnesses_on_a").get<bool>(),
                         jp.at("witnesses").get<std::vector<int>>()});
    return r;
  });
}

json sample_to_json(const AssemblySample& s) {
  json intended = json::array();
  for (const auto& [a, b] : s.intended_pairs) intended.push_back({a, b});
  return {{"family", to_string(s.family)},       {"prompt", s.prompt},
          {"condition", part_to_json(s.condition)}, {"target", part_to_json(s.target)},
          {"contact_pairs", report_to_json(s.contact_pairs)}, {"intended_pairs", std::move(intended)}};
}

AssemblySample sample_from_json(const json& j) {
  return guarded([&] {
    AssemblySample s;
    try {
      s.family = family_from_string(j.at("family").get<std::string>());
    } catch (const Error& e) {
      throw Error("malformed-input", e.what());
    }
    s.prompt = j.at("prompt").get<std::string>();
    s.condition = part_from_json(j.at("condition"));
    s.target = part_from_json(j.at("target"));
    s.contact_pairs = report_from_json(j.at("contact_pairs"));
    for (const auto& p : j.value("intended_pairs", json::array()))
      s.intended_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return s;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed-input", path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw Error("io-error", "write failed for " + path);
}

PartModel read_part(const std::string& path) { return part_from_json(read_json_file(path)); }
void write_part(const std::string& path, const PartModel& model) { write_json_file(path, part_to_json(model)); }
AssemblySample read_sample(const std::string& path) { return sample_from_json(read_json_file(path)); }
void write_sample(const std::string& path, const AssemblySample& sample) { write_json_file(path, sample_to_json(sample)); }

std::vector<std::string> json_files_in(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error("io-error", dir + " is not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

void write_dataset(const std::string& dir, const std::vector<AssemblySample>& samples) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu.json", i);
    write_sample((std::filesystem::path(dir) / name).string(), samples[i]);
  }
}

std::vector<AssemblySample> read_dataset(const std::string& dir) {
  std::vector<AssemblySample> out;
  for (const auto& f : json_files_in(dir)) {
    try {
      out.push_back(read_sample(f));
    } catch (const Error& e) {
      if (e.code() == "malformed-input") throw Error("malformed-input", f + ": " + e.what());
      throw;
    }
  }
  if (out.empty()) throw Error("malformed-input", "no samples in " + dir);
  return out;
}

}  // namespace geoknit
