#include "milboundary/experiments.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "milboundary/parallel.hpp"

namespace milb {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<const BoundaryLabelMap*> gt_pointers(const LoadedDataset& data) {
  std::vector<const BoundaryLabelMap*> gt;
  gt.reserve(data.samples.size());
  for (const Sample& s : data.samples) gt.push_back(&s.gt_boundaries);
  return gt;
}

double mean_cam_iou(const RunConfig& cfg, const LoadedDataset& data) {
  const double fg_threshold = 1.0 - cfg.seed_thresholds.fg_keep_fraction;
  double sum = 0.0;
  for (const Sample& s : data.samples) sum += cam_quality(s.cams, s.gt_mask, fg_threshold);
  return sum / static_cast<double>(data.samples.size());
}

}  // namespace

PipelineRunResult run_pipeline_in_memory(const RunConfig& cfg, bool labels_from_gt,
                                         bool apply_msf, bool apply_nms) {
  PipelineRunResult r;
  r.data = generate_dataset(cfg);
  const std::vector<ConfidentLabelMap> seeds =
      labels_from_gt ? seed_maps_from_gt(r.data) : compute_seed_maps(cfg, r.data);
  r.cam_iou = labels_from_gt ? 1.0 : mean_cam_iou(cfg, r.data);
  r.train = train_wsbdn(cfg, r.data, seeds);
  r.pseudo = compute_pseudo_labels(cfg, r.data, r.train.params, apply_msf, apply_nms);

  std::vector<MultiGridF> soft;
  std::vector<const BoundaryLabelMap*> hard;
  soft.reserve(r.pseudo.labels.size());
  for (const auto& p : r.pseudo.labels) {
    soft.push_back(p.soft);
    hard.push_back(&p.hard);
  }
  r.report = evaluate_predictions(soft, hard, gt_pointers(r.data), cfg.eval_tolerance,
                                  cfg.eval_thresholds, cfg.threads, cfg.deterministic);
  return r;
}

std::vector<BranchAblationRow> run_branch_ablation(const RunConfig& cfg,
                                                   const LoadedDataset& data,
                                                   const ModelParams<float>& params) {
  const auto n = static_cast<int64_t>(data.samples.size());
  std::vector<Prediction<float>> preds(static_cast<size_t>(n));
  parallel_for(n, cfg.threads, cfg.deterministic, [&](int64_t i) {
    preds[static_cast<size_t>(i)] =
        msf_predict(params, data.samples[static_cast<size_t>(i)].image, cfg.msf);
  });

  const std::vector<const BoundaryLabelMap*> gt = gt_pointers(data);
  auto eval_soft = [&](const std::vector<MultiGridF>& soft) {
    return evaluate_predictions(soft, {}, gt, cfg.eval_tolerance, cfg.eval_thresholds,
                                cfg.threads, cfg.deterministic);
  };

  std::vector<BranchAblationRow> rows;
  const int C = params.cfg.num_classes;

  // B_aw alone, class channels filtered to the image labels.
  {
    std::vector<MultiGridF> soft;
    for (int64_t i = 0; i < n; ++i)
      soft.push_back(filter_irrelevant_classes(preds[static_cast<size_t>(i)].b_aw,
                                               data.samples[static_cast<size_t>(i)].image_labels));
    const EvalReport rep = eval_soft(soft);
    BranchAblationRow row;
    row.map_name = "B_aw";
    row.has_class_aware = true;
    row.aware_mf = rep.row("mean").mf;
    row.aware_map = rep.row("mean").ap;
    row.agnostic_mf = rep.row("agnostic").mf;
    row.agnostic_ap = rep.row("agnostic").ap;
    rows.push_back(row);
  }
  // B_ag alone has no class information; evaluate class-agnostic only by
  // broadcasting the single map into one channel.
  {
    std::vector<MultiGridF> soft;
    for (int64_t i = 0; i < n; ++i) {
      MultiGridF m(1, preds[static_cast<size_t>(i)].b_ag.rows(),
                   preds[static_cast<size_t>(i)].b_ag.cols());
      m[0] = preds[static_cast<size_t>(i)].b_ag;
      soft.push_back(std::move(m));
    }
    std::vector<BoundaryLabelMap> gt_agn_storage;
    std::vector<const BoundaryLabelMap*> gt_agn;
    for (int64_t i = 0; i < n; ++i) {
      const auto& g = data.samples[static_cast<size_t>(i)].gt_boundaries;
      BoundaryLabelMap one(g.height(), g.width(), 1);
      one.bits = (g.bits.array() != 0u).cast<uint32_t>();
      gt_agn_storage.push_back(std::move(one));
    }
    for (const auto& g : gt_agn_storage) gt_agn.push_back(&g);
    const EvalReport rep =
        evaluate_predictions(soft, {}, gt_agn, cfg.eval_tolerance, cfg.eval_thresholds,
                             cfg.threads, cfg.deterministic);
    BranchAblationRow row;
    row.map_name = "B_ag";
    row.has_class_aware = false;
    row.agnostic_mf = rep.row("agnostic").mf;
    row.agnostic_ap = rep.row("agnostic").ap;
    rows.push_back(row);
  }
  // Element-wise product.
  {
    std::vector<MultiGridF> soft;
    for (int64_t i = 0; i < n; ++i)
      soft.push_back(filter_irrelevant_classes(preds[static_cast<size_t>(i)].b_final,
                                               data.samples[static_cast<size_t>(i)].image_labels));
    const EvalReport rep = eval_soft(soft);
    BranchAblationRow row;
    row.map_name = "B_aw*B_ag";
    row.has_class_aware = true;
    row.aware_mf = rep.row("mean").mf;
    row.aware_map = rep.row("mean").ap;
    row.agnostic_mf = rep.row("agnostic").mf;
    row.agnostic_ap = rep.row("agnostic").ap;
    rows.push_back(row);
  }
  (void)C;
  return rows;
}

void write_branch_ablation_csv(const fs::path& path, const std::vector<BranchAblationRow>& rows) {
  std::ofstream out(path);
  out << "map,aware_map,aware_mf,agnostic_ap,agnostic_mf\n";
  for (const auto& r : rows) {
    out << r.map_name << ",";
    if (r.has_class_aware)
      out << fmt(r.aware_map) << "," << fmt(r.aware_mf);
    else
      out << "-,-";
    out << "," << fmt(r.agnostic_ap) << "," << fmt(r.agnostic_mf) << "\n";
  }
}

std::vector<MsfNmsRow> run_msf_nms_ablation(const RunConfig& cfg, const LoadedDataset& data,
                                            const ModelParams<float>& params) {
  std::vector<MsfNmsRow> rows;
  const std::vector<const BoundaryLabelMap*> gt = gt_pointers(data);
  for (const bool msf_on : {false, true}) {
    for (const bool nms_on : {false, true}) {
      PseudoOutputs pseudo = compute_pseudo_labels(cfg, data, params, msf_on, nms_on);
      std::vector<MultiGridF> soft;
      std::vector<const BoundaryLabelMap*> hard;
      for (const auto& p : pseudo.labels) {
        soft.push_back(p.soft);
        hard.push_back(&p.hard);
      }
      const EvalReport rep = evaluate_predictions(soft, hard, gt, cfg.eval_tolerance,
                                                  cfg.eval_thresholds, cfg.threads,
                                                  cfg.deterministic);
      MsfNmsRow row;
      row.msf = msf_on;
      row.nms = nms_on;
      row.soft_mf = rep.row("mean").mf;
      row.soft_map = rep.row("mean").ap;
      row.hard_mf = rep.row("hard:mean").mf;
      row.hard_map = rep.row("hard:mean").ap;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_msf_nms_csv(const fs::path& path, const std::vector<MsfNmsRow>& rows) {
  std::ofstream out(path);
  out << "msf,nms,soft_map,soft_mf,hard_map,hard_mf\n";
  for (const auto& r : rows)
    out << (r.msf ? 1 : 0) << "," << (r.nms ? 1 : 0) << "," << fmt(r.soft_map) << ","
        << fmt(r.soft_mf) << "," << fmt(r.hard_map) << "," << fmt(r.hard_mf) << "\n";
}

std::vector<CamLadderPoint> run_cam_robustness(const RunConfig& base_cfg,
                                               const std::vector<CamLadderLevel>& levels) {
  if (levels.size() < 3)
    throw InvalidInputError("run_cam_robustness: need at least 3 ladder levels");
  std::vector<CamLadderPoint> points;
  for (const auto& level : levels) {
    RunConfig cfg = base_cfg;
    cfg.cam = level.deg;
    cfg.resolve();
    const PipelineRunResult run = run_pipeline_in_memory(cfg, level.use_gt);
    CamLadderPoint p;
    p.name = level.name;
    p.use_gt = level.use_gt;
    p.cam_iou = run.cam_iou;
    p.soft_aware_mf = run.report.row("mean").mf;
    p.hard_aware_mf = run.report.row("hard:mean").mf;
    points.push_back(p);
  }
  return points;
}

void write_cam_ladder_csv(const fs::path& path, const std::vector<CamLadderPoint>& points) {
  std::ofstream out(path);
  out << "level,uses_gt,cam_iou,soft_aware_mf,hard_aware_mf\n";
  for (const auto& p : points)
    out << p.name << "," << (p.use_gt ? 1 : 0) << "," << fmt(p.cam_iou) << ","
        << fmt(p.soft_aware_mf) << "," << fmt(p.hard_aware_mf) << "\n";
}

std::vector<SweepPoint> run_hyper_sweep(const SweepSpec& spec) {
  if (spec.parameter != "gamma" && spec.parameter != "lambda")
    throw InvalidInputError("run_hyper_sweep: parameter must be 'gamma' or 'lambda'");
  if (spec.values.empty()) throw InvalidInputError("run_hyper_sweep: no values");
  std::vector<SweepPoint> points;
  for (double v : spec.values) {
    RunConfig cfg = spec.base;
    if (spec.parameter == "gamma")
      cfg.gamma = v;
    else
      cfg.lambda = v;
    cfg.resolve();
    const PipelineRunResult run = run_pipeline_in_memory(cfg);
    SweepPoint p;
    p.value = v;
    p.soft_aware_mf = run.report.row("mean").mf;
    p.hard_aware_mf = run.report.row("hard:mean").mf;
    p.soft_agnostic_mf = run.report.row("agnostic").mf;
    p.hard_agnostic_mf = run.report.row("hard:agnostic").mf;
    points.push_back(p);
  }
  return points;
}

void write_sweep_csv(const fs::path& path, const SweepSpec& spec,
                     const std::vector<SweepPoint>& points) {
  std::ofstream out(path);
  out << spec.parameter << ",soft_aware_mf,hard_aware_mf,soft_agnostic_mf,hard_agnostic_mf\n";
  for (const auto& p : points)
    out << fmt(p.value) << "," << fmt(p.soft_aware_mf) << "," << fmt(p.hard_aware_mf) << ","
        << fmt(p.soft_agnostic_mf) << "," << fmt(p.hard_agnostic_mf) << "\n";
}

}  // namespace milb
