#include "milboundary/runconfig.hpp"

#include <fstream>
#include <set>

namespace milb {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::string& scope,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(scope, "must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError(scope.empty() ? key : scope + "." + key, "unknown key");
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "disc") return ShapeKind::Disc;
  if (s == "rectangle") return ShapeKind::Rectangle;
  if (s == "triangle") return ShapeKind::Triangle;
  if (s == "ring") return ShapeKind::Ring;
  throw ConfigError("scene.class_kinds", "unknown shape kind '" + s + "'");
}

std::string shape_kind_to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Disc: return "disc";
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Triangle: return "triangle";
    case ShapeKind::Ring: return "ring";
  }
  return "disc";
}

void parse_optim(const json& j, const std::string& scope, OptimConfig& o) {
  reject_unknown_keys(j, scope,
                      {"base_lr", "momentum", "weight_decay", "poly_power", "total_steps"});
  get_if(j, "base_lr", o.base_lr);
  get_if(j, "momentum", o.momentum);
  get_if(j, "weight_decay", o.weight_decay);
  get_if(j, "poly_power", o.poly_power);
  get_if(j, "total_steps", o.total_steps);
  if (o.total_steps < 0) throw ConfigError(scope + ".total_steps", "must be >= 0");
  if (o.base_lr <= 0) throw ConfigError(scope + ".base_lr", "must be > 0");
}

json optim_to_json(const OptimConfig& o) {
  return json{{"base_lr", o.base_lr},
              {"momentum", o.momentum},
              {"weight_decay", o.weight_decay},
              {"poly_power", o.poly_power},
              {"total_steps", o.total_steps}};
}

}  // namespace

void RunConfig::resolve() {
  scene.seed = seed;
  net.input_size = scene.image_size;
  net.num_classes = scene.num_classes;
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (num_samples < 1) throw ConfigError("num_samples", "must be >= 1");
  if (eval_thresholds < 1) throw ConfigError("eval.num_thresholds", "must be >= 1");
  MatchConfig{eval_tolerance}.validate();
  scene.validate();
  cam.validate();
  seed_thresholds.validate();
  GammaParam{gamma}.validate();
  if (lambda < 0) throw ConfigError("mil.lambda", "must be >= 0");
  net.validate();
  msf.validate();
  nms.validate();
  make_refiner(refiner);  // validates spelling
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  reject_unknown_keys(j, "",
                      {"seed", "deterministic", "threads", "num_samples", "scene", "cam", "seeds",
                       "segments", "mil", "augment", "net", "optim", "student", "msf", "nms",
                       "eval"});
  get_if(j, "seed", cfg.seed);
  get_if(j, "deterministic", cfg.deterministic);
  get_if(j, "threads", cfg.threads);
  get_if(j, "num_samples", cfg.num_samples);

  if (j.contains("scene")) {
    const json& s = j["scene"];
    reject_unknown_keys(s, "scene",
                        {"image_size", "num_classes", "min_shapes", "max_shapes",
                         "noise_amplitude", "class_kinds"});
    get_if(s, "image_size", cfg.scene.image_size);
    get_if(s, "num_classes", cfg.scene.num_classes);
    get_if(s, "min_shapes", cfg.scene.min_shapes);
    get_if(s, "max_shapes", cfg.scene.max_shapes);
    get_if(s, "noise_amplitude", cfg.scene.noise_amplitude);
    if (s.contains("class_kinds")) {
      cfg.scene.class_kinds.clear();
      for (const auto& k : s["class_kinds"])
        cfg.scene.class_kinds.push_back(shape_kind_from_string(k.get<std::string>()));
    }
  }
  if (j.contains("cam")) {
    const json& s = j["cam"];
    reject_unknown_keys(s, "cam", {"blur_sigma", "erosion_radius", "part_bias", "noise_amplitude"});
    get_if(s, "blur_sigma", cfg.cam.blur_sigma);
    get_if(s, "erosion_radius", cfg.cam.erosion_radius);
    get_if(s, "part_bias", cfg.cam.part_bias);
    get_if(s, "noise_amplitude", cfg.cam.noise_amplitude);
  }
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    reject_unknown_keys(s, "seeds", {"fg_keep_fraction", "bg_keep_fraction", "refiner"});
    get_if(s, "fg_keep_fraction", cfg.seed_thresholds.fg_keep_fraction);
    get_if(s, "bg_keep_fraction", cfg.seed_thresholds.bg_keep_fraction);
    get_if(s, "refiner", cfg.refiner);
  }
  if (j.contains("segments")) {
    const json& s = j["segments"];
    reject_unknown_keys(s, "segments", {"gamma", "max_pairs_per_pixel"});
    get_if(s, "gamma", cfg.gamma);
    get_if(s, "max_pairs_per_pixel", cfg.max_pairs_per_pixel);
  }
  if (j.contains("mil")) {
    const json& s = j["mil"];
    reject_unknown_keys(s, "mil", {"lambda", "epsilon"});
    get_if(s, "lambda", cfg.lambda);
    get_if(s, "epsilon", cfg.mil_eps);
  }
  if (j.contains("augment")) {
    const json& s = j["augment"];
    reject_unknown_keys(s, "augment", {"flip"});
    get_if(s, "flip", cfg.flip_augment);
  }
  if (j.contains("net")) {
    const json& s = j["net"];
    reject_unknown_keys(s, "net",
                        {"stage_channels", "stage_strides", "proj_channels", "head_channels"});
    if (s.contains("stage_channels")) {
      const auto v = s["stage_channels"].get<std::vector<int>>();
      if (v.size() != 4) throw ConfigError("net.stage_channels", "must have 4 entries");
      std::copy(v.begin(), v.end(), cfg.net.stage_channels.begin());
    }
    if (s.contains("stage_strides")) {
      const auto v = s["stage_strides"].get<std::vector<int>>();
      if (v.size() != 4) throw ConfigError("net.stage_strides", "must have 4 entries");
      std::copy(v.begin(), v.end(), cfg.net.stage_strides.begin());
    }
    get_if(s, "proj_channels", cfg.net.proj_channels);
    get_if(s, "head_channels", cfg.net.head_channels);
  }
  if (j.contains("optim")) parse_optim(j["optim"], "optim", cfg.optim);
  if (j.contains("student")) parse_optim(j["student"], "student", cfg.student_optim);
  if (j.contains("msf")) {
    const json& s = j["msf"];
    reject_unknown_keys(s, "msf", {"scales", "use_flip"});
    if (s.contains("scales")) cfg.msf.scales = s["scales"].get<std::vector<double>>();
    get_if(s, "use_flip", cfg.msf.use_flip);
  }
  if (j.contains("nms")) {
    const json& s = j["nms"];
    reject_unknown_keys(s, "nms", {"radius", "multiplier", "smooth_sigma"});
    get_if(s, "radius", cfg.nms.radius);
    get_if(s, "multiplier", cfg.nms.multiplier);
    get_if(s, "smooth_sigma", cfg.nms.smooth_sigma);
  }
  if (j.contains("eval")) {
    const json& s = j["eval"];
    reject_unknown_keys(s, "eval", {"tolerance_px", "num_thresholds"});
    get_if(s, "tolerance_px", cfg.eval_tolerance);
    get_if(s, "num_thresholds", cfg.eval_thresholds);
  }
  cfg.resolve();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("JSON parse error: ") + e.what());
  }
  return run_config_from_json(j);
}

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["deterministic"] = cfg.deterministic;
  j["threads"] = cfg.threads;
  j["num_samples"] = cfg.num_samples;
  json kinds = json::array();
  for (auto k : cfg.scene.class_kinds) kinds.push_back(shape_kind_to_string(k));
  j["scene"] = json{{"image_size", cfg.scene.image_size},
                    {"num_classes", cfg.scene.num_classes},
                    {"min_shapes", cfg.scene.min_shapes},
                    {"max_shapes", cfg.scene.max_shapes},
                    {"noise_amplitude", cfg.scene.noise_amplitude},
                    {"class_kinds", kinds}};
  j["cam"] = json{{"blur_sigma", cfg.cam.blur_sigma},
                  {"erosion_radius", cfg.cam.erosion_radius},
                  {"part_bias", cfg.cam.part_bias},
                  {"noise_amplitude", cfg.cam.noise_amplitude}};
  j["seeds"] = json{{"fg_keep_fraction", cfg.seed_thresholds.fg_keep_fraction},
                    {"bg_keep_fraction", cfg.seed_thresholds.bg_keep_fraction},
                    {"refiner", cfg.refiner}};
  j["segments"] = json{{"gamma", cfg.gamma}, {"max_pairs_per_pixel", cfg.max_pairs_per_pixel}};
  j["mil"] = json{{"lambda", cfg.lambda}, {"epsilon", cfg.mil_eps}};
  j["augment"] = json{{"flip", cfg.flip_augment}};
  j["net"] = json{{"stage_channels", cfg.net.stage_channels},
                  {"stage_strides", cfg.net.stage_strides},
                  {"proj_channels", cfg.net.proj_channels},
                  {"head_channels", cfg.net.head_channels}};
  j["optim"] = optim_to_json(cfg.optim);
  j["student"] = optim_to_json(cfg.student_optim);
  j["msf"] = json{{"scales", cfg.msf.scales}, {"use_flip", cfg.msf.use_flip}};
  j["nms"] = json{{"radius", cfg.nms.radius},
                  {"multiplier", cfg.nms.multiplier},
                  {"smooth_sigma", cfg.nms.smooth_sigma}};
  j["eval"] = json{{"tolerance_px", cfg.eval_tolerance}, {"num_thresholds", cfg.eval_thresholds}};
  return j;
}

void write_config_echo(const std::filesystem::path& dir, const RunConfig& cfg) {
  std::ofstream out(dir / "config.json");
  if (!out) throw std::runtime_error("cannot write config echo in " + dir.string());
  out << run_config_to_json(cfg).dump(2) << "\n";
}

std::string run_config_schema_help() {
  return R"(Config JSON (all keys optional; unknown keys rejected):
  seed (int, default 20240612)       deterministic (bool, true)
  threads (int, 1)                   num_samples (int, 200)
  scene:    image_size (64) num_classes (3) min_shapes (1) max_shapes (3)
            noise_amplitude (0.05) class_kinds ([disc|rectangle|triangle|ring], cycles)
  cam:      blur_sigma (1.0) erosion_radius (1.0) part_bias (0.0) noise_amplitude (0.03)
  seeds:    fg_keep_fraction (0.70) bg_keep_fraction (0.05) refiner ("majority:3"|"identity")
  segments: gamma (10.0) max_pairs_per_pixel (0 = all)
  mil:      lambda (0.25) epsilon (1e-7)
  augment:  flip (true)
  net:      stage_channels ([16,32,64,64]) stage_strides ([1,2,2,1])
            proj_channels (8) head_channels (16)
  optim:    base_lr (0.01) momentum (0.9) weight_decay (1e-4) poly_power (0.9) total_steps (2000)
  student:  same keys as optim
  msf:      scales ([0.75,1.0,1.25]) use_flip (true)
  nms:      radius (10) multiplier (1.1) smooth_sigma (1.0)
  eval:     tolerance_px (2.0) num_thresholds (99)
)";
}

}  // namespace milb
