#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evenspace/cli.hpp"
#include "json.hpp"

namespace cli = evenspace::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops lines that legitimately differ between otherwise equal runs.
std::string strip(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# timestamp:", 0) == 0 || line.rfind("# config.out =", 0) == 0 ||
        line.rfind("# config.no-timestamp =", 0) == 0)
      continue;
    out += line + "\n";
  }
  return out;
}

fs::path out_dir() {
  const char* dir = std::getenv(cli::kOutDirEnv);
  return dir ? fs::path(dir) : fs::temp_directory_path();
}

const std::vector<std::vector<std::string>> kCommands = {
    {"verify-identity", "--graph", "theta", "--p", "0.2,0.5,0.8"},
    {"dl-experiment", "--n", "2", "--p", "0.8", "--trials", "200", "--seed", "5", "--workers", "1"},
    {"dl-experiment", "--n", "2", "--p", "0.9", "--trials", "20", "--model", "fk-glauber", "--sweeps", "5",
     "--seed", "6"},
    {"gensets", "--graph", "grid:6x6", "--k", "4", "--p", "0.9", "--trials", "5", "--seed", "7"},
    {"domination", "--graph", "cycle:4", "--p", "0.7"},
    {"enumerate-geodesics", "--graph", "dl:n=2,margin=1", "--vertex", "o", "--max-len", "8"},
    {"enumerate-geodesics", "--graph", "grid:5x5", "--vertex", "center", "--max-len", "8", "--notion", "omega",
     "--p", "0.8", "--seed", "8"},
    {"sample", "--model", "loop", "--graph", "k4", "--p", "0.6", "--trials", "2000", "--seed", "9"},
    {"sample", "--model", "ues", "--graph", "triangle", "--p", "0.6", "--trials", "500", "--seed", "10",
     "--method", "coinflip"},
    {"distribution", "--model", "ues-of-fk", "--graph", "k4", "--p", "0.5"},
};

}  // namespace

TEST_CASE("every command is byte-identical across reruns") {
  for (auto args : kCommands) {
    args.push_back("--no-timestamp");
    CAPTURE(args[0]);
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.code == cli::kOk);
    CHECK(a.err == "");
    CHECK(a.out == b.out);
    CHECK(a.out.size() > 0);
  }
}

TEST_CASE("timestamps are the only difference without --no-timestamp") {
  const auto& args = kCommands[1];
  auto quiet = args;
  quiet.push_back("--no-timestamp");
  CHECK(strip(run(args).out) == strip(run(quiet).out));
}

TEST_CASE("--out writes under the output directory") {
  for (std::size_t i = 0; i < kCommands.size(); ++i) {
    auto args = kCommands[i];
    const std::string name = "run_" + std::to_string(i) + ".csv";
    const fs::path target = out_dir() / name;
    fs::remove(target);
    args.insert(args.end(), {"--no-timestamp", "--out", name});
    const Run r = run(args);
    CAPTURE(args[0]);
    CHECK(r.code == cli::kOk);
    CHECK(r.out.empty());
    REQUIRE(fs::exists(target));
    auto plain = kCommands[i];
    plain.push_back("--no-timestamp");
    CHECK(strip(slurp(target)) == strip(run(plain).out));
  }
}

TEST_CASE("json output parses and matches the csv rows") {
  for (auto args : kCommands) {
    args.insert(args.end(), {"--no-timestamp", "--format", "json"});
    CAPTURE(args[0]);
    const Run r = run(args);
    REQUIRE(r.code == cli::kOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["command"] == args[0]);
    CHECK(doc.contains("config"));
    CHECK(doc.contains("summary"));
    REQUIRE(doc["rows"].is_array());

    auto csv_args = args;
    csv_args.resize(csv_args.size() - 2);
    std::istringstream in(run(csv_args).out);
    std::size_t data_lines = 0;
    for (std::string line; std::getline(in, line);)
      if (!line.empty() && line[0] != '#') ++data_lines;
    CHECK(doc["rows"].size() + 1 == data_lines);  // header line
  }
}

TEST_CASE("seeds change sampled output") {
  const Run a = run({"sample", "--model", "fk", "--graph", "k4", "--p", "0.5", "--trials", "1000", "--seed", "1",
                     "--no-timestamp"});
  const Run b = run({"sample", "--model", "fk", "--graph", "k4", "--p", "0.5", "--trials", "1000", "--seed", "2",
                     "--no-timestamp"});
  CHECK(a.out != b.out);
}
