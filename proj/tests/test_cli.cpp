#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + GEOKNIT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("command line round trip") {
  const fs::path dir = fs::temp_directory_path() / "geoknit_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  REQUIRE(run("synth-data --families peg_socket --count 6 --seed 3 --out " + d + "/data") == 0);
  CHECK(fs::exists(dir / "data" / "sample_00005.json"));
  REQUIRE(run("train --data " + d + "/data --out " + d + "/model.ckpt --epochs 2 --seed 1") == 0);
  CHECK(fs::exists(dir / "model.ckpt"));
  CHECK(line_count(dir / "model.loss.csv") == 3);

  const std::string cond = d + "/data/sample_00000.json";
  fs::create_directories(dir / "gen");
  REQUIRE(run("sample --model " + d + "/model.ckpt --cond " + cond + " --guided --seed 4 --out " + d +
              "/gen/sample_00000.json") == 0);
  const fs::path trace = dir / "gen" / "sample_00000.trace.jsonl";
  REQUIRE(fs::exists(trace));
  CHECK(line_count(trace) == 4);
  {
    std::ifstream in(trace);
    std::string first;
    std::getline(in, first);
    CHECK(nlohmann::json::parse(first).at("t") == 110);
  }
  REQUIRE(run("sample --model " + d + "/model.ckpt --cond " + cond + " --seed 4 --out " + d + "/plain.json --trace " +
              d + "/plain.jsonl") == 0);
  CHECK(line_count(dir / "plain.jsonl") == 0);

  REQUIRE(run("evaluate --gen " + d + "/gen --ref " + d + "/data --out " + d + "/report.json") == 0);
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(line_count(dir / "report.csv") == 2);

  CHECK(run("annotate --pair " + cond + " " + cond + " --out " + d + "/contacts.json") == 0);
  CHECK(run("heatmap --models " + d + "/gen --out " + d + "/heat.svg") == 0);

  {
    std::ofstream bad(dir / "bad.json");
    bad << "{\"faces\": [1, 2";
  }
  CHECK(run("sample --model " + d + "/model.ckpt --cond " + d + "/bad.json --out " + d + "/x.json") == 2);
  CHECK(run("sample --model " + d + "/missing.ckpt --cond " + cond + " --out " + d + "/x.json") == 2);
  CHECK(run("synth-data --families teapot --out " + d + "/t") == 2);
  CHECK(run("train --data " + d + "/data --out " + d + "/boom.ckpt --epochs 5 --lr 1e8") == 3);
  CHECK(run("no-such-command") != 0);

  fs::remove_all(dir);
}
