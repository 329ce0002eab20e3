#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "milboundary/eval.hpp"
#include "milboundary/manifest.hpp"
#include "milboundary/pseudolabel.hpp"
#include "milboundary/runconfig.hpp"
#include "milboundary/seeds.hpp"
#include "milboundary/student.hpp"

namespace milb {

struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<Sample> samples;
};

// In-memory stages (shared by the CLI commands and the experiment drivers).
LoadedDataset generate_dataset(const RunConfig& cfg);
LoadedDataset load_dataset(const std::filesystem::path& dir);

std::vector<ConfidentLabelMap> compute_seed_maps(const RunConfig& cfg, const LoadedDataset& data);
// Confident maps taken directly from ground-truth masks (every pixel
// confident); used for the upper-bound labeling mode.
std::vector<ConfidentLabelMap> seed_maps_from_gt(const LoadedDataset& data);

struct TrainLogEntry {
  int step = 0;
  double lr = 0.0;
  double total = 0.0;
  double loss_ag = 0.0;
  double loss_aw = 0.0;
};

struct WsbdnTrainResult {
  ModelParams<float> params;
  OptimState<float> opt;
  std::vector<TrainLogEntry> log;
};

WsbdnTrainResult train_wsbdn(const RunConfig& cfg, const LoadedDataset& data,
                             const std::vector<ConfidentLabelMap>& seed_maps);

struct PseudoOutputs {
  std::vector<PseudoLabels> labels;  // aligned with dataset samples
};

PseudoOutputs compute_pseudo_labels(const RunConfig& cfg, const LoadedDataset& data,
                                    const ModelParams<float>& params, bool apply_msf = true,
                                    bool apply_nms = true);

// Student training on hard targets (pseudo labels or ground truth); only the
// class-aware branch is supervised.
ModelParams<float> train_student_model(const RunConfig& cfg, const LoadedDataset& data,
                                       const std::vector<BoundaryLabelMap>& targets);

// Class-aware soft predictions of a trained student (MSF over b_aw).
std::vector<MultiGridF> student_soft_predictions(const RunConfig& cfg, const LoadedDataset& data,
                                                 const ModelParams<float>& params);

struct EvalRow {
  std::string name;  // "0".."C-1", "mean", "agnostic", and "hard:..." variants
  double mf = 0.0;
  double best_threshold = 0.0;
  double ap = 0.0;
  MatchCounts at_best;
  bool has_counts = false;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<std::string> curve_names;
  std::vector<PrCurve> curves;

  const EvalRow& row(const std::string& name) const;
};

// Dataset evaluation of per-class soft maps and optional hard bitmaps
// against ground-truth boundaries.
EvalReport evaluate_predictions(const std::vector<MultiGridF>& soft,
                                const std::vector<const BoundaryLabelMap*>& hard,
                                const std::vector<const BoundaryLabelMap*>& gt, double tol,
                                int n_thresholds, int threads, bool deterministic);

void write_eval_report(const std::filesystem::path& out_dir, const EvalReport& report,
                       bool with_svg = true);

// On-disk stage commands (used by the CLI); each echoes its resolved config
// into the output directory.
void cmd_gen(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_seeds(const RunConfig& cfg, const std::filesystem::path& data_dir,
               const std::filesystem::path& out_dir);
void cmd_segments_debug(const RunConfig& cfg, const std::filesystem::path& data_dir,
                        const std::filesystem::path& seeds_dir,
                        const std::filesystem::path& out_csv, int sample_id);
void cmd_train_wsbdn(const RunConfig& cfg, const std::filesystem::path& data_dir,
                     const std::filesystem::path& seeds_dir,
                     const std::filesystem::path& out_dir, bool labels_from_gt = false);
void cmd_pseudo(const RunConfig& cfg, const std::filesystem::path& data_dir,
                const std::filesystem::path& checkpoint, const std::filesystem::path& out_dir);
void cmd_train_student(const RunConfig& cfg, const std::filesystem::path& data_dir,
                       const std::filesystem::path& pseudo_dir,
                       const std::filesystem::path& out_dir, bool targets_from_gt = false);
void cmd_eval(const RunConfig& cfg, const std::filesystem::path& pred_dir,
              const std::filesystem::path& gt_dir, const std::filesystem::path& out_dir);

std::vector<ConfidentLabelMap> load_seed_maps(const std::filesystem::path& seeds_dir,
                                              const DatasetManifest& manifest);

}  // namespace milb
