#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "milboundary/pipeline.hpp"

namespace milb {

// Table-style row for the branch-combination ablation: each output map is
// evaluated class-aware (per-class soft maps) where it has class channels,
// and class-agnostic always.
struct BranchAblationRow {
  std::string map_name;  // "B_aw", "B_ag", "B_aw*B_ag"
  bool has_class_aware = false;
  double aware_map = 0.0;  // mean AP over classes
  double aware_mf = 0.0;   // mean MF over classes
  double agnostic_ap = 0.0;
  double agnostic_mf = 0.0;
};

std::vector<BranchAblationRow> run_branch_ablation(const RunConfig& cfg,
                                                   const LoadedDataset& data,
                                                   const ModelParams<float>& params);
void write_branch_ablation_csv(const std::filesystem::path& path,
                               const std::vector<BranchAblationRow>& rows);

// 2x2 MSF/NMS grid over one trained checkpoint; soft metrics depend only on
// the MSF setting.
struct MsfNmsRow {
  bool msf = false, nms = false;
  double soft_map = 0.0, soft_mf = 0.0;
  double hard_map = 0.0, hard_mf = 0.0;
};

std::vector<MsfNmsRow> run_msf_nms_ablation(const RunConfig& cfg, const LoadedDataset& data,
                                            const ModelParams<float>& params);
void write_msf_nms_csv(const std::filesystem::path& path, const std::vector<MsfNmsRow>& rows);

// CAM robustness ladder: one entry per degradation level, plus an optional
// ground-truth-labeling level (use_gt = true; CAM IoU reported as 1).
struct CamLadderLevel {
  std::string name;
  CamDegradation deg;
  bool use_gt = false;
};

struct CamLadderPoint {
  std::string name;
  double cam_iou = 0.0;
  double soft_aware_mf = 0.0;
  double hard_aware_mf = 0.0;
  bool use_gt = false;
};

std::vector<CamLadderPoint> run_cam_robustness(const RunConfig& base_cfg,
                                               const std::vector<CamLadderLevel>& levels);
void write_cam_ladder_csv(const std::filesystem::path& path,
                          const std::vector<CamLadderPoint>& points);

// Hyper-parameter sweep: retrains per value and reports soft/hard mean MF.
struct SweepSpec {
  std::string parameter;       // "gamma" | "lambda"
  std::vector<double> values;
  RunConfig base;
};

struct SweepPoint {
  double value = 0.0;
  double soft_aware_mf = 0.0;
  double hard_aware_mf = 0.0;
  double soft_agnostic_mf = 0.0;
  double hard_agnostic_mf = 0.0;
};

std::vector<SweepPoint> run_hyper_sweep(const SweepSpec& spec);
void write_sweep_csv(const std::filesystem::path& path, const SweepSpec& spec,
                     const std::vector<SweepPoint>& points);

// Full in-memory pipeline for one config: gen, seeds (or gt labels), train,
// pseudo, evaluate. Shared by sweeps, the ladder, and the acceptance smoke.
struct PipelineRunResult {
  LoadedDataset data;
  WsbdnTrainResult train;
  PseudoOutputs pseudo;
  EvalReport report;
  double cam_iou = 0.0;  // mean CAM IoU over the corpus (1 when labels_from_gt)
};

PipelineRunResult run_pipeline_in_memory(const RunConfig& cfg, bool labels_from_gt = false,
                                         bool apply_msf = true, bool apply_nms = true);

}  // namespace milb
