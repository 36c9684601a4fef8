#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mono/cli.hpp"
#include "json.hpp"

#include <sys/wait.h>

namespace fs = std::filesystem;
using mono::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mono_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every file except the manifest, keyed by name.
std::map<std::string, std::string> outputs(const fs::path& dir) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != "manifest.json") m[e.path().filename().string()] = slurp(e.path());
  }
  return m;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Small response and rating datasets shared by the subcommand tests.
struct Fixture {
  fs::path root = fresh_dir("fixture");
  fs::path responses = root / "responses";
  fs::path ratings = root / "ratings";

  Fixture() {
    write(root / "spec.json",
          R"({"preset": "accuracy_correlated", "models": 8, "companies": 3, "items": 1500, "company_weight": 0.3})");
    REQUIRE(cli({"synth", "--spec", (root / "spec.json").string(), "--seed", "4", "--out", responses.string()})
                .code == 0);
    REQUIRE(cli({"synth", "--preset", "company_ratings", "--seed", "7", "--out", ratings.string()}).code == 0);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"synth", "--no-such-flag"}).code == 1);
  CHECK(cli({"market", "--threads", "0"}).code == 1);
  CHECK(cli({"correlate", "--format", "xml"}).code == 1);
  const auto r = cli({"synth"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).out.find(mono::cli::kVersion) != std::string::npos);
}

TEST_CASE("data errors exit with 2") {
  const auto dir = fresh_dir("data_errors");
  auto r = cli({"correlate", "--responses", "/nonexistent.csv", "--key", "/nonexistent_key.csv", "--out",
                dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  write(dir / "bad.json", "{ not json");
  CHECK(cli({"market", "--scenario", (dir / "bad.json").string(), "--out", dir.string()}).code == 2);
  write(dir / "key.csv", "item_id,correct_answer,num_choices\nq1,0,4\n");
  write(dir / "resp.csv", "model_id,item_id,answer\nm1,q1,9\n");
  CHECK(cli({"correlate", "--responses", (dir / "resp.csv").string(), "--key", (dir / "key.csv").string(), "--out",
             dir.string()})
            .code == 2);
}

TEST_CASE("synth writes datasets and a manifest") {
  const auto& f = fixture();
  CHECK(fs::exists(f.responses / "responses.csv"));
  CHECK(fs::exists(f.responses / "key.csv"));
  CHECK(fs::exists(f.responses / "metadata.csv"));
  CHECK(fs::exists(f.responses / "expected_agreement.csv"));
  CHECK(fs::exists(f.ratings / "ratings.csv"));
  CHECK(fs::exists(f.ratings / "human.csv"));
  const auto manifest = nlohmann::json::parse(slurp(f.responses / "manifest.json"));
  CHECK(manifest["subcommand"] == "synth");
  CHECK(manifest["seed"] == 4);
  CHECK(manifest["version"] == mono::cli::kVersion);
  CHECK(manifest["outputs"].size() == 5);  // four data files plus the manifest itself
  CHECK_FALSE(manifest.contains("threads"));
}

TEST_CASE("every subcommand is byte identical across reruns and thread counts") {
  const auto& f = fixture();
  const std::string resp = (f.responses / "responses.csv").string();
  const std::string key = (f.responses / "key.csv").string();
  const std::string meta = (f.responses / "metadata.csv").string();
  const std::string rat = (f.ratings / "ratings.csv").string();
  const std::string hum = (f.ratings / "human.csv").string();
  const std::string rmeta = (f.ratings / "metadata.csv").string();
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--preset", "independent", "--seed", "2"},
      {"correlate", "--responses", resp, "--key", key, "--metric", "both_wrong", "--metric", "overall"},
      {"correlate", "--ratings", rat, "--human", hum, "--metric", "residual"},
      {"regress", "--responses", resp, "--key", key, "--metadata", meta},
      {"regress", "--ratings", rat, "--human", hum, "--metadata", rmeta, "--metric", "residual"},
      {"judge", "--responses", resp, "--key", key, "--metadata", meta},
      {"market", "--ratings", rat, "--human", hum, "--metadata", rmeta, "--method", "same", "--method", "random",
       "--method", "uniform", "--replicates", "40", "--budget", "uniform_1_to_F", "--seed", "9"},
  };
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::map<std::string, std::string> first;
    std::string first_manifest;
    for (const char* threads : {"1", "3", "1"}) {
      const auto dir = fresh_dir("det_" + std::to_string(c) + "_" + threads);
      auto args = commands[c];
      args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
      const auto r = cli(args);
      INFO(commands[c][0], " ", r.err);
      REQUIRE(r.code == 0);
      const auto files = outputs(dir);
      CHECK_FALSE(files.empty());
      if (first.empty()) {
        first = files;
        first_manifest = slurp(dir / "manifest.json");
      } else {
        CHECK(files == first);
        CHECK(slurp(dir / "manifest.json") == first_manifest);
      }
    }
  }
}

TEST_CASE("json format writes tables as arrays of objects") {
  const auto& f = fixture();
  const auto dir = fresh_dir("json");
  const auto r = cli({"correlate", "--responses", (f.responses / "responses.csv").string(), "--key",
                      (f.responses / "key.csv").string(), "--format", "json", "--out", dir.string()});
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(dir / "summary.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j.is_array());
  CHECK(j.at(0).is_object());
  CHECK_FALSE(fs::exists(dir / "summary.csv"));
}

TEST_CASE("market writes the expected tables and figures") {
  const auto& f = fixture();
  const auto dir = fresh_dir("market");
  const auto r = cli({"market", "--ratings", (f.ratings / "ratings.csv").string(), "--human",
                      (f.ratings / "human.csv").string(), "--metadata", (f.ratings / "metadata.csv").string(),
                      "--method", "same", "--replicates", "20", "--budget", "uniform_1_to_F", "--llm-sweep", "3",
                      "--out", dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  for (const char* name : {"summary.csv", "exclusion_curve.csv", "exclusion_curve.svg", "avg_rank.csv",
                           "avg_rank.svg", "buckets.csv", "buckets.svg", "budget.csv", "budget.svg",
                           "llm_count.csv", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir / name), name);
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["inputs"].size() == 3);
  CHECK(manifest["inputs"].begin()->contains("fnv1a64"));
}

TEST_CASE("output directory comes from the flag, then the environment") {
  const auto env_dir = fresh_dir("env");
  const auto flag_dir = fresh_dir("flag");
  ::setenv(mono::cli::kOutDirEnv, env_dir.string().c_str(), 1);
  CHECK(cli({"market", "--replicates", "5", "--firms", "3"}).code == 0);
  CHECK(fs::exists(env_dir / "summary.csv"));
  CHECK(cli({"market", "--replicates", "5", "--firms", "3", "--out", flag_dir.string()}).code == 0);
  CHECK(fs::exists(flag_dir / "summary.csv"));
  ::unsetenv(mono::cli::kOutDirEnv);
}

TEST_CASE("the installed binary reports exit codes") {
  const char* bin = std::getenv("MONO_CLI");
  if (!bin) {
    MESSAGE("MONO_CLI not set; binary check skipped");
    return;
  }
  const std::string b = std::string("\"") + bin + "\"";
  auto code = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(code(b + " --version") == 0);
  CHECK(code(b + " bogus") == 1);
  CHECK(code(b + " correlate --responses /nonexistent --key /nonexistent --out " +
             fresh_dir("bin").string()) == 2);
}
