#include "milboundary/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "milboundary/experiments.hpp"
#include "milboundary/pipeline.hpp"
#include "milboundary/svg.hpp"

namespace milb {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool deterministic_flag = false;
  double tol = 0.0;
  bool tol_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration (defaults when omitted)");
  cmd->add_option("--seed", o.seed, "override the config seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--threads", o.threads,
                  "worker threads (fallback: MILBOUNDARY_THREADS, then config)");
  cmd->add_flag("--deterministic", o.deterministic_flag,
                "force ordered reductions and static scheduling");
  cmd->add_option("--tol", o.tol, "override evaluation tolerance in pixels")
      ->each([&](const std::string&) { o.tol_set = true; });
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (o.threads > 0) {
    cfg.threads = o.threads;
  } else if (const char* env = std::getenv("MILBOUNDARY_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) cfg.threads = t;
  }
  if (o.deterministic_flag) cfg.deterministic = true;
  if (o.tol_set) cfg.eval_tolerance = o.tol;
  cfg.resolve();
  return cfg;
}

void cmd_report(const fs::path& runs_dir, const fs::path& out_csv) {
  std::vector<std::pair<std::string, std::string>> found;  // (run name, metrics path)
  if (!fs::exists(runs_dir)) throw InvalidInputError("report: no such directory " + runs_dir.string());
  for (const auto& entry : fs::recursive_directory_iterator(runs_dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "metrics.csv")
      found.emplace_back(fs::relative(entry.path().parent_path(), runs_dir).string(),
                         entry.path().string());
  }
  std::sort(found.begin(), found.end());
  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write " + out_csv.string());
  out << "run,class,mf,best_threshold,ap,tp,fp,fn\n";
  std::cout << "run,class,mf,ap\n";
  for (const auto& [name, path] : found) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      out << name << "," << line << "\n";
      std::istringstream ls(line);
      std::string cls, mf, bt, ap;
      std::getline(ls, cls, ',');
      std::getline(ls, mf, ',');
      std::getline(ls, bt, ',');
      std::getline(ls, ap, ',');
      if (cls == "mean" || cls == "agnostic" || cls == "hard:mean" || cls == "hard:agnostic")
        std::cout << name << "," << cls << "," << mf << "," << ap << "\n";
    }
  }
  std::cout << "wrote " << out_csv.string() << " (" << found.size() << " runs)\n";
}

std::vector<CamLadderLevel> default_cam_ladder(const RunConfig& cfg) {
  std::vector<CamLadderLevel> levels;
  levels.push_back({"gt", CamDegradation{}, true});
  const CamDegradation base = cfg.cam;
  const double scales[4] = {0.5, 1.0, 2.0, 3.0};
  for (int i = 0; i < 4; ++i) {
    CamDegradation d;
    d.blur_sigma = base.blur_sigma * scales[i];
    d.erosion_radius = base.erosion_radius * scales[i];
    d.part_bias = base.part_bias;
    d.noise_amplitude = base.noise_amplitude * scales[i];
    levels.push_back({"level" + std::to_string(i), d, false});
  }
  return levels;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"milboundary: weakly-supervised semantic boundary detection lab"};
  app.require_subcommand(1);
  app.footer(run_config_schema_help());

  CommonOpts opts;
  std::string data_dir, seeds_dir, out_dir, checkpoint, pseudo_dir, pred_dir, gt_dir, runs_dir;
  std::string param, values_csv;
  int sample_id = 0;
  bool labels_from_gt = false, targets_from_gt = false;

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen, opts);
  gen->add_option("--out", out_dir, "output dataset directory")->required();

  CLI::App* seeds = app.add_subcommand("seeds", "confident label maps from CAMs");
  add_common(seeds, opts);
  seeds->add_option("--data", data_dir, "dataset directory")->required();
  seeds->add_option("--out", out_dir, "output directory")->required();

  CLI::App* segdbg = app.add_subcommand("segments-debug", "dump valid line segments as CSV");
  add_common(segdbg, opts);
  segdbg->add_option("--data", data_dir)->required();
  segdbg->add_option("--seeds", seeds_dir)->required();
  segdbg->add_option("--out", out_dir, "output CSV path")->required();
  segdbg->add_option("--sample", sample_id, "sample id (default 0)");

  CLI::App* trainw = app.add_subcommand("train-wsbdn", "train the two-branch network with MIL");
  add_common(trainw, opts);
  trainw->add_option("--data", data_dir)->required();
  trainw->add_option("--seeds", seeds_dir, "seed maps directory (omit with --labels-from-gt)");
  trainw->add_flag("--labels-from-gt", labels_from_gt,
                   "label segments from ground-truth masks (upper bound)");
  trainw->add_option("--out", out_dir)->required();

  CLI::App* pseudo = app.add_subcommand("pseudo", "generate pseudo boundary labels");
  add_common(pseudo, opts);
  pseudo->add_option("--data", data_dir)->required();
  pseudo->add_option("--checkpoint", checkpoint)->required();
  pseudo->add_option("--out", out_dir)->required();

  CLI::App* trains = app.add_subcommand("train-student", "train the student on pseudo labels");
  add_common(trains, opts);
  trains->add_option("--data", data_dir)->required();
  trains->add_option("--pseudo", pseudo_dir, "pseudo label directory (omit with --targets-from-gt)");
  trains->add_flag("--targets-from-gt", targets_from_gt, "train on ground-truth boundaries");
  trains->add_option("--out", out_dir)->required();

  CLI::App* evalc = app.add_subcommand("eval", "boundary PR evaluation");
  add_common(evalc, opts);
  evalc->add_option("--pred", pred_dir, "pseudo-label directory or dataset directory")->required();
  evalc->add_option("--gt", gt_dir, "dataset directory with ground truth")->required();
  evalc->add_option("--out", out_dir)->required();

  CLI::App* sweep = app.add_subcommand("sweep", "ablations and hyper-parameter sweeps");
  add_common(sweep, opts);
  sweep->add_option("--param", param, "gamma|lambda|msf_nms|branch_combo|cam_degradation")
      ->required();
  sweep->add_option("--values", values_csv, "comma-separated values (gamma/lambda sweeps)");
  sweep->add_option("--data", data_dir, "dataset directory (msf_nms/branch_combo)");
  sweep->add_option("--checkpoint", checkpoint, "trained checkpoint (msf_nms/branch_combo)");
  sweep->add_option("--out", out_dir)->required();

  CLI::App* report = app.add_subcommand("report", "collate metrics.csv files");
  add_common(report, opts);
  report->add_option("--runs", runs_dir, "directory tree containing runs")->required();
  report->add_option("--out", out_dir, "output summary CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    std::cerr << app.help();
    return 2;
  }

  const RunConfig cfg = resolve_config(opts);

  if (gen->parsed()) {
    cmd_gen(cfg, out_dir);
  } else if (seeds->parsed()) {
    cmd_seeds(cfg, data_dir, out_dir);
  } else if (segdbg->parsed()) {
    cmd_segments_debug(cfg, data_dir, seeds_dir, out_dir, sample_id);
  } else if (trainw->parsed()) {
    if (!labels_from_gt && seeds_dir.empty())
      throw CLI::RequiredError("--seeds (or --labels-from-gt)");
    cmd_train_wsbdn(cfg, data_dir, seeds_dir, out_dir, labels_from_gt);
  } else if (pseudo->parsed()) {
    cmd_pseudo(cfg, data_dir, checkpoint, out_dir);
  } else if (trains->parsed()) {
    if (!targets_from_gt && pseudo_dir.empty())
      throw CLI::RequiredError("--pseudo (or --targets-from-gt)");
    cmd_train_student(cfg, data_dir, pseudo_dir, out_dir, targets_from_gt);
  } else if (evalc->parsed()) {
    cmd_eval(cfg, pred_dir, gt_dir, out_dir);
  } else if (sweep->parsed()) {
    fs::create_directories(out_dir);
    write_config_echo(out_dir, cfg);
    if (param == "gamma" || param == "lambda") {
      SweepSpec spec;
      spec.parameter = param;
      spec.base = cfg;
      std::istringstream vs(values_csv);
      std::string tok;
      while (std::getline(vs, tok, ',')) spec.values.push_back(std::stod(tok));
      const auto points = run_hyper_sweep(spec);
      write_sweep_csv(fs::path(out_dir) / "sweep.csv", spec, points);
      ChartSeries soft{"soft mean MF", {}}, hard{"hard mean MF", {}};
      for (const auto& p : points) {
        soft.points.emplace_back(p.value, p.soft_aware_mf);
        hard.points.emplace_back(p.value, p.hard_aware_mf);
      }
      write_line_chart(fs::path(out_dir) / "sweep.svg", param + " sweep", param, "mean MF",
                       {soft, hard});
    } else if (param == "msf_nms" || param == "branch_combo") {
      if (data_dir.empty() || checkpoint.empty())
        throw CLI::RequiredError("--data and --checkpoint");
      LoadedDataset data = load_dataset(data_dir);
      ModelParams<float> params = zero_params<float>(cfg.net);
      load_checkpoint(checkpoint, params);
      if (param == "msf_nms")
        write_msf_nms_csv(fs::path(out_dir) / "msf_nms.csv",
                          run_msf_nms_ablation(cfg, data, params));
      else
        write_branch_ablation_csv(fs::path(out_dir) / "branch_ablation.csv",
                                  run_branch_ablation(cfg, data, params));
    } else if (param == "cam_degradation") {
      const auto points = run_cam_robustness(cfg, default_cam_ladder(cfg));
      write_cam_ladder_csv(fs::path(out_dir) / "cam_ladder.csv", points);
      ChartSeries s{"hard mean MF", {}};
      for (const auto& p : points) s.points.emplace_back(p.cam_iou, p.hard_aware_mf);
      write_line_chart(fs::path(out_dir) / "cam_ladder.svg", "CAM robustness", "CAM IoU",
                       "mean MF", {s});
    } else {
      throw CLI::ValidationError("--param", "unknown sweep parameter '" + param + "'");
    }
  } else if (report->parsed()) {
    cmd_report(runs_dir, out_dir);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  try {
    return dispatch(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace milb
