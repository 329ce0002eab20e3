#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "milboundary/eval.hpp"
#include "milboundary/net.hpp"
#include "milboundary/pseudolabel.hpp"
#include "milboundary/seeds.hpp"
#include "milboundary/segments.hpp"
#include "milboundary/synthgen.hpp"

namespace milb {

// One configuration for the whole pipeline. Loaded from JSON with unknown
// keys rejected; every field has a documented default.
struct RunConfig {
  uint64_t seed = 20240612;
  bool deterministic = true;
  int threads = 1;
  int num_samples = 200;

  SceneConfig scene;  // scene.seed mirrors the top-level seed
  CamDegradation cam{1.0, 1.0, 0.0, 0.03};
  SeedThresholds seed_thresholds;
  std::string refiner = "majority:3";

  double gamma = 10.0;
  uint32_t max_pairs_per_pixel = 0;

  double lambda = 0.25;
  double mil_eps = kProbClamp;
  bool flip_augment = true;

  NetConfig net;  // input_size/num_classes mirror the scene config
  OptimConfig optim;
  OptimConfig student_optim;

  MsfConfig msf;
  NmsConfig nms;

  double eval_tolerance = 2.0;
  int eval_thresholds = 99;

  void resolve();  // propagates seed/sizes into sub-configs and validates
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);
void write_config_echo(const std::filesystem::path& dir, const RunConfig& cfg);

// --help text describing the config schema and defaults.
std::string run_config_schema_help();

}  // namespace milb
