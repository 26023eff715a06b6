#pragma once

#include <string>
#include <vector>

#include "geoknit/pipeline/synth.hpp"
#include "json.hpp"

namespace geoknit {

/// Malformed documents throw Error "malformed-input"; unreadable files
/// "io-error".
nlohmann::json part_to_json(const PartModel& model);
PartModel part_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const ContactReport& report);
ContactReport report_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const AssemblySample& sample);
AssemblySample sample_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

PartModel read_part(const std::string& path);
void write_part(const std::string& path, const PartModel& model);
AssemblySample read_sample(const std::string& path);
void write_sample(const std::string& path, const AssemblySample& sample);

/// Sorted list of *.json files in a directory.
std::vector<std::string> json_files_in(const std::string& dir);
/// sample_00000.json, sample_00001.json, ...
void write_dataset(const std::string& dir, const std::vector<AssemblySample>& samples);
std::vector<AssemblySample> read_dataset(const std::string& dir);

}  // namespace geoknit
