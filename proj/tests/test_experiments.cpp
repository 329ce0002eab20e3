#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "milboundary/experiments.hpp"

using namespace milb;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_cfg() {
  RunConfig cfg;
  cfg.seed = 808;
  cfg.num_samples = 10;
  cfg.scene.image_size = 32;
  cfg.net.stage_channels = {6, 8, 12, 12};
  cfg.net.proj_channels = 3;
  cfg.net.head_channels = 6;
  cfg.gamma = 6.0;
  cfg.optim.total_steps = 120;
  cfg.student_optim.total_steps = 60;
  cfg.msf.scales = {1.0};
  cfg.msf.use_flip = true;
  cfg.nms.radius = 5;
  cfg.eval_thresholds = 19;
  cfg.resolve();
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("branch ablation rows and rerun determinism") {
  const RunConfig cfg = tiny_cfg();
  const LoadedDataset data = generate_dataset(cfg);
  const auto seeds = compute_seed_maps(cfg, data);
  const WsbdnTrainResult train = train_wsbdn(cfg, data, seeds);

  const auto rows = run_branch_ablation(cfg, data, train.params);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].map_name == "B_aw");
  CHECK(rows[1].map_name == "B_ag");
  CHECK(rows[2].map_name == "B_aw*B_ag");
  CHECK(rows[0].has_class_aware);
  CHECK_FALSE(rows[1].has_class_aware);  // no class information in B_ag
  CHECK(rows[2].has_class_aware);

  const fs::path dir = fs::temp_directory_path() / "milb_exp_test";
  fs::create_directories(dir);
  write_branch_ablation_csv(dir / "ablation_a.csv", rows);
  const auto rows2 = run_branch_ablation(cfg, data, train.params);
  write_branch_ablation_csv(dir / "ablation_b.csv", rows2);
  CHECK(slurp(dir / "ablation_a.csv") == slurp(dir / "ablation_b.csv"));

  // The B_ag row renders empty class-aware cells.
  const std::string csv = slurp(dir / "ablation_a.csv");
  CHECK(csv.find("B_ag,-,-") != std::string::npos);
}

TEST_CASE("msf/nms ablation: soft metrics identical across the NMS toggle") {
  const RunConfig cfg = tiny_cfg();
  const LoadedDataset data = generate_dataset(cfg);
  const auto seeds = compute_seed_maps(cfg, data);
  const WsbdnTrainResult train = train_wsbdn(cfg, data, seeds);
  const auto rows = run_msf_nms_ablation(cfg, data, train.params);
  REQUIRE(rows.size() == 4);
  // Rows: (msf off, nms off), (off, on), (on, off), (on, on).
  CHECK(rows[0].soft_mf == rows[1].soft_mf);
  CHECK(rows[0].soft_map == rows[1].soft_map);
  CHECK(rows[2].soft_mf == rows[3].soft_mf);
  CHECK(rows[2].soft_map == rows[3].soft_map);
}

TEST_CASE("gamma sweep produces one row per value") {
  RunConfig base = tiny_cfg();
  base.optim.total_steps = 60;
  base.num_samples = 8;
  base.resolve();
  SweepSpec spec;
  spec.parameter = "gamma";
  spec.values = {4.0, 6.0};
  spec.base = base;
  const auto points = run_hyper_sweep(spec);
  REQUIRE(points.size() == 2);
  CHECK(points[0].value == 4.0);
  CHECK(points[1].value == 6.0);
  for (const auto& p : points) {
    CHECK(p.soft_aware_mf >= 0.0);
    CHECK(p.soft_aware_mf <= 1.0);
    CHECK(p.hard_aware_mf >= 0.0);
  }
  const fs::path dir = fs::temp_directory_path() / "milb_exp_test";
  fs::create_directories(dir);
  write_sweep_csv(dir / "sweep.csv", spec, points);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("gamma,", 0) == 0);

  SweepSpec bad;
  bad.parameter = "nope";
  bad.values = {1.0};
  bad.base = base;
  CHECK_THROWS_AS(run_hyper_sweep(bad), InvalidInputError);
}

TEST_CASE("lambda=0 sweep cell trains with the class-aware loss only") {
  RunConfig cfg = tiny_cfg();
  cfg.lambda = 0.0;
  cfg.optim.total_steps = 30;
  cfg.num_samples = 6;
  cfg.resolve();
  const LoadedDataset data = generate_dataset(cfg);
  const auto seeds = compute_seed_maps(cfg, data);
  const WsbdnTrainResult result = train_wsbdn(cfg, data, seeds);
  const ModelParams<float> fresh = init_params<float>(cfg.net, cfg.seed);
  // Branch-1 head tensors keep their initialization when lambda = 0.
  for (int id = 0; id < kNumTensors; ++id)
    if (tensor_is_branch_ag(id))
      CHECK(result.params.t(id).value == fresh.t(id).value);
}
