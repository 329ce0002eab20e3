#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "milboundary/cli.hpp"
#include "milboundary/runconfig.hpp"

using namespace milb;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  std::vector<const char*> argv{"milboundary"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "milb_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_small_config(const fs::path& dir) {
  const fs::path p = dir / "cfg.json";
  std::ofstream out(p);
  out << R"({
    "seed": 321,
    "num_samples": 6,
    "scene": {"image_size": 32, "num_classes": 2},
    "net": {"stage_channels": [4,6,8,8], "proj_channels": 3, "head_channels": 5},
    "segments": {"gamma": 5.0},
    "optim": {"total_steps": 10},
    "student": {"total_steps": 5},
    "msf": {"scales": [1.0], "use_flip": false},
    "eval": {"num_thresholds": 19}
  })";
  return p;
}

std::map<std::string, std::vector<char>> read_tree(const fs::path& dir) {
  std::map<std::string, std::vector<char>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), dir).string()] =
        std::vector<char>(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

}  // namespace

TEST_CASE("unknown subcommands and flags exit 2") {
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"gen", "--does-not-exist", "x", "--out", "/tmp/x"}) == 2);
  CHECK(run({}) == 2);  // a subcommand is required
}

TEST_CASE("config validation failures exit 3 and name the key") {
  const fs::path dir = fresh_dir("badcfg");
  const fs::path p = dir / "bad.json";
  {
    std::ofstream out(p);
    out << R"({"scene": {"image_size": 64, "wibble": 3}})";
  }
  CHECK(run({"gen", "--config", p.string(), "--out", (dir / "out").string()}) == 3);
  {
    std::ofstream out(p);
    out << R"({"scene": {"num_classes": 1}})";
  }
  CHECK(run({"gen", "--config", p.string(), "--out", (dir / "out").string()}) == 3);
}

TEST_CASE("gen is deterministic: rerun produces an identical tree") {
  const fs::path dir = fresh_dir("gen");
  const fs::path cfg = write_small_config(dir);
  const fs::path a = dir / "a", b = dir / "b";
  REQUIRE(run({"gen", "--config", cfg.string(), "--out", a.string()}) == 0);
  REQUIRE(run({"gen", "--config", cfg.string(), "--out", b.string()}) == 0);
  const auto ta = read_tree(a);
  const auto tb = read_tree(b);
  REQUIRE(ta.size() == tb.size());
  for (const auto& [name, bytes] : ta) {
    INFO("file ", name);
    REQUIRE(tb.count(name) == 1);
    CHECK(tb.at(name) == bytes);
  }
}

TEST_CASE("eval with pred = gt reports mean MF 1.0") {
  const fs::path dir = fresh_dir("evalgt");
  const fs::path cfg = write_small_config(dir);
  const fs::path data = dir / "data";
  REQUIRE(run({"gen", "--config", cfg.string(), "--out", data.string()}) == 0);
  const fs::path out = dir / "eval";
  REQUIRE(run({"eval", "--config", cfg.string(), "--pred", data.string(), "--gt", data.string(),
               "--out", out.string(), "--tol", "2"}) == 0);
  std::ifstream metrics(out / "metrics.csv");
  REQUIRE(metrics.good());
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "class,mf,best_threshold,ap,tp,fp,fn");
  bool saw_mean = false;
  while (std::getline(metrics, line)) {
    if (line.rfind("mean,", 0) == 0) {
      saw_mean = true;
      const auto comma = line.find(',');
      const double mf = std::stod(line.substr(comma + 1));
      CHECK(mf == doctest::Approx(1.0));
    }
  }
  CHECK(saw_mean);
}

TEST_CASE("full pipeline over the CLI on a tiny corpus") {
  const fs::path dir = fresh_dir("pipeline");
  const fs::path cfg = write_small_config(dir);
  const fs::path data = dir / "data", seeds = dir / "seeds", train = dir / "train",
                pseudo = dir / "pseudo", student = dir / "student", evald = dir / "eval";
  REQUIRE(run({"gen", "--config", cfg.string(), "--out", data.string()}) == 0);
  REQUIRE(run({"seeds", "--config", cfg.string(), "--data", data.string(), "--out",
               seeds.string()}) == 0);
  REQUIRE(run({"segments-debug", "--config", cfg.string(), "--data", data.string(), "--seeds",
               seeds.string(), "--out", (dir / "segs.csv").string(), "--sample", "0"}) == 0);
  REQUIRE(run({"train-wsbdn", "--config", cfg.string(), "--data", data.string(), "--seeds",
               seeds.string(), "--out", train.string()}) == 0);
  REQUIRE(run({"pseudo", "--config", cfg.string(), "--data", data.string(), "--checkpoint",
               (train / "checkpoint.wsbd").string(), "--out", pseudo.string()}) == 0);
  REQUIRE(run({"train-student", "--config", cfg.string(), "--data", data.string(), "--pseudo",
               pseudo.string(), "--out", student.string()}) == 0);
  REQUIRE(run({"eval", "--config", cfg.string(), "--pred", pseudo.string(), "--gt", data.string(),
               "--out", evald.string()}) == 0);
  CHECK(fs::exists(evald / "metrics.csv"));
  CHECK(fs::exists(evald / "pr_agnostic.csv"));

  // Every stage echoed its resolved configuration.
  for (const fs::path& d : {data, seeds, train, pseudo, student, evald})
    CHECK(fs::exists(d / "config.json"));

  // segments-debug CSV has the documented header.
  std::ifstream segs(dir / "segs.csv");
  std::string header;
  std::getline(segs, header);
  CHECK(header == "xi,yi,xj,yj,labels");

  const fs::path report = dir / "summary.csv";
  REQUIRE(run({"report", "--runs", dir.string(), "--out", report.string()}) == 0);
  CHECK(fs::exists(report));
}

TEST_CASE("missing pseudo labels name the sample") {
  const fs::path dir = fresh_dir("missing");
  const fs::path cfg = write_small_config(dir);
  const fs::path data = dir / "data";
  REQUIRE(run({"gen", "--config", cfg.string(), "--out", data.string()}) == 0);
  // Fabricate an empty pseudo dir with a manifest naming no samples.
  const fs::path pseudo = dir / "pseudo";
  fs::create_directories(pseudo);
  {
    std::ofstream out(pseudo / "pseudo_manifest.json");
    out << R"({"num_classes": 2, "checkpoint": "", "records": []})";
  }
  CHECK(run({"train-student", "--config", cfg.string(), "--data", data.string(), "--pseudo",
             pseudo.string(), "--out", (dir / "student").string()}) == 1);
}
