#include "milboundary/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "milboundary/image_io.hpp"
#include "milboundary/parallel.hpp"
#include "milboundary/svg.hpp"

namespace milb {

namespace fs = std::filesystem;

namespace {

std::string sample_tag(int id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", id);
  return buf;
}

ConfidentLabelMap flip_labels(const ConfidentLabelMap& m) {
  ConfidentLabelMap out = m;
  out.states = m.states.rowwise().reverse();
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

LoadedDataset generate_dataset(const RunConfig& cfg) {
  LoadedDataset data;
  data.manifest.num_classes = cfg.scene.num_classes;
  data.manifest.image_size = cfg.scene.image_size;
  data.manifest.seed = cfg.seed;
  data.manifest.config_echo = run_config_to_json(cfg);
  data.samples.resize(static_cast<size_t>(cfg.num_samples));
  data.manifest.samples.resize(static_cast<size_t>(cfg.num_samples));
  parallel_for(cfg.num_samples, cfg.threads, cfg.deterministic, [&](int64_t i) {
    Sample s = generate_scene(cfg.scene, cfg.cam, static_cast<int>(i));
    SampleRecord rec;
    rec.id = static_cast<int>(i);
    rec.image_labels = s.image_labels;
    const std::string tag = sample_tag(rec.id);
    rec.image_stem = "img_" + tag + ".pgm";
    rec.mask_path = "mask_" + tag + ".pgm";
    rec.boundary_stem = "bnd_" + tag + ".pgm";
    rec.cam_stem = "cam_" + tag + ".pfm";
    data.samples[static_cast<size_t>(i)] = std::move(s);
    data.manifest.samples[static_cast<size_t>(i)] = std::move(rec);
  });
  return data;
}

LoadedDataset load_dataset(const fs::path& dir) {
  LoadedDataset data;
  data.manifest = read_manifest(dir);
  data.samples.reserve(data.manifest.samples.size());
  for (const auto& rec : data.manifest.samples)
    data.samples.push_back(load_sample(dir, data.manifest, rec));
  return data;
}

std::vector<ConfidentLabelMap> compute_seed_maps(const RunConfig& cfg, const LoadedDataset& data) {
  const auto refiner = make_refiner(cfg.refiner);
  std::vector<ConfidentLabelMap> maps(data.samples.size());
  parallel_for(static_cast<int64_t>(data.samples.size()), cfg.threads, cfg.deterministic,
               [&](int64_t i) {
                 const Sample& s = data.samples[static_cast<size_t>(i)];
                 ConfidentLabelMap seed =
                     confident_regions(s.cams, s.image_labels, cfg.seed_thresholds);
                 maps[static_cast<size_t>(i)] = refiner->refine(seed, s.image);
               });
  return maps;
}

std::vector<ConfidentLabelMap> seed_maps_from_gt(const LoadedDataset& data) {
  std::vector<ConfidentLabelMap> maps;
  maps.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    ConfidentLabelMap m(s.gt_mask.height(), s.gt_mask.width(), s.gt_mask.num_classes);
    for (int y = 0; y < s.gt_mask.height(); ++y) {
      for (int x = 0; x < s.gt_mask.width(); ++x) {
        const uint8_t lab = s.gt_mask.labels(y, x);
        if (lab == kBackgroundLabel)
          m.set_background(y, x);
        else
          m.set_class(y, x, lab);
      }
    }
    maps.push_back(std::move(m));
  }
  return maps;
}

WsbdnTrainResult train_wsbdn(const RunConfig& cfg, const LoadedDataset& data,
                             const std::vector<ConfidentLabelMap>& seed_maps) {
  if (seed_maps.size() != data.samples.size())
    throw InvalidInputError("train_wsbdn: seed map count mismatch");
  WsbdnTrainResult result;
  result.params = init_params<float>(cfg.net, cfg.seed);
  result.opt = make_optim(result.params, cfg.optim);

  const auto n = static_cast<int>(data.samples.size());
  std::vector<FeatureMap<float>> features(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    features[static_cast<size_t>(i)] = image_to_features<float>(data.samples[static_cast<size_t>(i)].image);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  SegmentSubsample sub{cfg.max_pairs_per_pixel, cfg.seed};

  result.log.reserve(static_cast<size_t>(cfg.optim.total_steps));
  for (int step = 0; step < cfg.optim.total_steps; ++step) {
    if (step % n == 0) {
      Rng rng = Rng::for_index(cfg.seed, 1000003ULL + static_cast<uint64_t>(step / n));
      for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_int(0, i));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      }
    }
    const int idx = order[static_cast<size_t>(step % n)];
    Rng step_rng = Rng::for_index(cfg.seed, 7000003ULL + static_cast<uint64_t>(step));
    const bool flip = cfg.flip_augment && step_rng.next_bool();

    const ConfidentLabelMap labels =
        flip ? flip_labels(seed_maps[static_cast<size_t>(idx)]) : seed_maps[static_cast<size_t>(idx)];
    SegmentSets sets = enumerate_valid_segments(labels, cfg.gamma, sub);
    label_segments(sets, labels);

    FeatureMap<float> input;
    if (flip) {
      const Image8 flipped = mirror_horizontal(data.samples[static_cast<size_t>(idx)].image);
      input = image_to_features<float>(flipped);
    } else {
      input = features[static_cast<size_t>(idx)];
    }

    const double lr =
        poly_lr(result.opt.step, cfg.optim.total_steps, cfg.optim.base_lr, cfg.optim.poly_power);
    LossBreakdown<float> lb =
        train_step(result.params, result.opt, input, sets, cfg.lambda, cfg.mil_eps);
    result.log.push_back({step, lr, lb.total, lb.loss_ag, lb.loss_aw});
  }
  return result;
}

PseudoOutputs compute_pseudo_labels(const RunConfig& cfg, const LoadedDataset& data,
                                    const ModelParams<float>& params, bool apply_msf,
                                    bool apply_nms) {
  MsfConfig msf = cfg.msf;
  if (!apply_msf) {
    msf.scales = {1.0};
    msf.use_flip = false;
  }
  PseudoOutputs out;
  out.labels.resize(data.samples.size());
  parallel_for(static_cast<int64_t>(data.samples.size()), cfg.threads, cfg.deterministic,
               [&](int64_t i) {
                 const Sample& s = data.samples[static_cast<size_t>(i)];
                 out.labels[static_cast<size_t>(i)] = make_pseudo_labels(
                     params, s.image, s.image_labels, msf, cfg.nms, apply_nms);
               });
  return out;
}

ModelParams<float> train_student_model(const RunConfig& cfg, const LoadedDataset& data,
                                       const std::vector<BoundaryLabelMap>& targets) {
  if (targets.size() != data.samples.size())
    throw InvalidInputError("train_student_model: target count mismatch");
  // Student shares the architecture; a distinct seed stream keeps it
  // independent of the first-stage initialization.
  ModelParams<float> params = init_params<float>(cfg.net, cfg.seed ^ 0x51ddedULL);
  OptimState<float> opt = make_optim(params, cfg.student_optim);

  const auto n = static_cast<int>(data.samples.size());
  std::vector<FeatureMap<float>> features(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    features[static_cast<size_t>(i)] = image_to_features<float>(data.samples[static_cast<size_t>(i)].image);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Grid<float> zero_dag = Grid<float>::Zero(cfg.net.input_size, cfg.net.input_size);

  for (int step = 0; step < cfg.student_optim.total_steps; ++step) {
    if (step % n == 0) {
      Rng rng = Rng::for_index(cfg.seed, 3000017ULL + static_cast<uint64_t>(step / n));
      for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_int(0, i));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      }
    }
    const int idx = order[static_cast<size_t>(step % n)];
    Rng step_rng = Rng::for_index(cfg.seed, 9000011ULL + static_cast<uint64_t>(step));
    const bool flip = cfg.flip_augment && step_rng.next_bool();

    FeatureMap<float> input;
    BoundaryLabelMap target = targets[static_cast<size_t>(idx)];
    if (flip) {
      input = image_to_features<float>(mirror_horizontal(data.samples[static_cast<size_t>(idx)].image));
      target = mirror_horizontal(target);
    } else {
      input = features[static_cast<size_t>(idx)];
    }

    ForwardCtx<float> ctx;
    NetOutputs<float> outs = forward(params, input, &ctx);
    BceResult<float> bce = balanced_bce(outs.b_aw, target);
    if (!std::isfinite(bce.value))
      throw TrainingError("train_student_model: non-finite loss at step " + std::to_string(step));
    ParamGrads<float> grads = backward(params, ctx, zero_dag, bce.grad);
    sgd_update(params, opt, grads);
  }
  return params;
}

std::vector<MultiGridF> student_soft_predictions(const RunConfig& cfg, const LoadedDataset& data,
                                                 const ModelParams<float>& params) {
  std::vector<MultiGridF> preds(data.samples.size());
  parallel_for(static_cast<int64_t>(data.samples.size()), cfg.threads, cfg.deterministic,
               [&](int64_t i) {
                 const Sample& s = data.samples[static_cast<size_t>(i)];
                 Prediction<float> p = msf_predict(params, s.image, cfg.msf);
                 preds[static_cast<size_t>(i)] =
                     filter_irrelevant_classes(p.b_aw, s.image_labels);
               });
  return preds;
}

const EvalRow& EvalReport::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw InvalidInputError("EvalReport: no row named '" + name + "'");
}

EvalReport evaluate_predictions(const std::vector<MultiGridF>& soft,
                                const std::vector<const BoundaryLabelMap*>& hard,
                                const std::vector<const BoundaryLabelMap*>& gt, double tol,
                                int n_thresholds, int threads, bool deterministic) {
  if (soft.empty() || soft.size() != gt.size())
    throw InvalidInputError("evaluate_predictions: size mismatch");
  const int C = gt[0]->num_classes;
  const auto n = static_cast<int64_t>(soft.size());

  EvalReport report;
  // Tasks: per-class soft, agnostic soft, then hard variants if provided.
  struct Task {
    std::string name;
    std::vector<GridF> pred;
    std::vector<GridU8> truth;
    bool is_hard = false;
  };
  std::vector<Task> tasks;
  for (int c = 0; c < C; ++c) {
    Task t;
    t.name = std::to_string(c);
    t.pred.reserve(static_cast<size_t>(n));
    t.truth.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      t.pred.push_back(soft[static_cast<size_t>(i)][c]);
      t.truth.push_back(bitplane(*gt[static_cast<size_t>(i)], c));
    }
    tasks.push_back(std::move(t));
  }
  {
    Task t;
    t.name = "agnostic";
    for (int64_t i = 0; i < n; ++i) {
      t.pred.push_back(max_channels(soft[static_cast<size_t>(i)]));
      t.truth.push_back(or_channels(*gt[static_cast<size_t>(i)]));
    }
    tasks.push_back(std::move(t));
  }
  if (!hard.empty()) {
    if (hard.size() != soft.size())
      throw InvalidInputError("evaluate_predictions: hard size mismatch");
    for (int c = 0; c < C; ++c) {
      Task t;
      t.name = "hard:" + std::to_string(c);
      t.is_hard = true;
      for (int64_t i = 0; i < n; ++i) {
        t.pred.push_back(bitplane(*hard[static_cast<size_t>(i)], c).cast<float>());
        t.truth.push_back(bitplane(*gt[static_cast<size_t>(i)], c));
      }
      tasks.push_back(std::move(t));
    }
    Task t;
    t.name = "hard:agnostic";
    t.is_hard = true;
    for (int64_t i = 0; i < n; ++i) {
      t.pred.push_back(or_channels(*hard[static_cast<size_t>(i)]).cast<float>());
      t.truth.push_back(or_channels(*gt[static_cast<size_t>(i)]));
    }
    tasks.push_back(std::move(t));
  }

  std::vector<PrCurve> curves(tasks.size());
  parallel_for(static_cast<int64_t>(tasks.size()), threads, deterministic, [&](int64_t ti) {
    const Task& t = tasks[static_cast<size_t>(ti)];
    curves[static_cast<size_t>(ti)] =
        pr_curve(t.pred, t.truth, tol, t.is_hard ? 1 : n_thresholds);
  });

  auto add_row = [&](const std::string& name, const PrCurve& curve) {
    const MfResult mf = mf_ods(curve);
    EvalRow row;
    row.name = name;
    row.mf = mf.mf;
    row.best_threshold = mf.best_threshold;
    row.ap = average_precision(curve);
    row.at_best = curve.counts[mf.best_index];
    row.has_counts = true;
    report.rows.push_back(row);
  };
  double soft_mf_sum = 0, soft_ap_sum = 0, hard_mf_sum = 0, hard_ap_sum = 0;
  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    add_row(tasks[ti].name, curves[ti]);
    report.curve_names.push_back(tasks[ti].name);
    report.curves.push_back(curves[ti]);
    const EvalRow& row = report.rows.back();
    if (!tasks[ti].is_hard && tasks[ti].name != "agnostic") {
      soft_mf_sum += row.mf;
      soft_ap_sum += row.ap;
    } else if (tasks[ti].is_hard && tasks[ti].name != "hard:agnostic") {
      hard_mf_sum += row.mf;
      hard_ap_sum += row.ap;
    }
  }
  EvalRow mean_row;
  mean_row.name = "mean";
  mean_row.mf = soft_mf_sum / C;
  mean_row.ap = soft_ap_sum / C;
  report.rows.push_back(mean_row);
  if (!hard.empty()) {
    EvalRow hard_mean;
    hard_mean.name = "hard:mean";
    hard_mean.mf = hard_mf_sum / C;
    hard_mean.ap = hard_ap_sum / C;
    report.rows.push_back(hard_mean);
  }
  return report;
}

void write_eval_report(const fs::path& out_dir, const EvalReport& report, bool with_svg) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "metrics.csv");
    out << "class,mf,best_threshold,ap,tp,fp,fn\n";
    for (const auto& row : report.rows) {
      out << row.name << "," << format_double(row.mf) << "," << format_double(row.best_threshold)
          << "," << format_double(row.ap) << ",";
      if (row.has_counts)
        out << row.at_best.tp << "," << row.at_best.fp << "," << row.at_best.fn;
      else
        out << ",,";
      out << "\n";
    }
  }
  for (size_t i = 0; i < report.curves.size(); ++i) {
    std::string safe_name = report.curve_names[i];
    std::replace(safe_name.begin(), safe_name.end(), ':', '_');
    std::ofstream out(out_dir / ("pr_" + safe_name + ".csv"));
    out << "threshold,precision,recall,f\n";
    const PrCurve& c = report.curves[i];
    for (size_t k = 0; k < c.thresholds.size(); ++k)
      out << format_double(c.thresholds[k]) << "," << format_double(c.precision[k]) << ","
          << format_double(c.recall[k]) << "," << format_double(c.f[k]) << "\n";
    if (with_svg) {
      ChartSeries s;
      s.name = report.curve_names[i];
      for (size_t k = 0; k < c.thresholds.size(); ++k)
        s.points.emplace_back(c.recall[k], c.precision[k]);
      write_line_chart(out_dir / ("pr_" + safe_name + ".svg"), "PR " + report.curve_names[i],
                       "recall", "precision", {s});
    }
  }
}

// ---------------------------------------------------------------------------
// On-disk commands

void cmd_gen(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  LoadedDataset data = generate_dataset(cfg);
  for (size_t i = 0; i < data.samples.size(); ++i)
    write_sample_files(out_dir, data.manifest.samples[i], data.samples[i]);
  write_manifest(out_dir, data.manifest);
  write_config_echo(out_dir, cfg);
}

void cmd_seeds(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  LoadedDataset data = load_dataset(data_dir);
  const std::vector<ConfidentLabelMap> maps = compute_seed_maps(cfg, data);
  for (size_t i = 0; i < maps.size(); ++i) {
    const std::string tag = sample_tag(data.manifest.samples[i].id);
    write_pgm(out_dir / ("seed_" + tag + ".pgm"), maps[i].states);
  }
  write_config_echo(out_dir, cfg);
}

std::vector<ConfidentLabelMap> load_seed_maps(const fs::path& seeds_dir,
                                              const DatasetManifest& manifest) {
  std::vector<ConfidentLabelMap> maps;
  maps.reserve(manifest.samples.size());
  for (const auto& rec : manifest.samples) {
    ConfidentLabelMap m;
    m.states = read_pgm(seeds_dir / ("seed_" + sample_tag(rec.id) + ".pgm"));
    m.num_classes = manifest.num_classes;
    maps.push_back(std::move(m));
  }
  return maps;
}

void cmd_segments_debug(const RunConfig& cfg, const fs::path& data_dir, const fs::path& seeds_dir,
                        const fs::path& out_csv, int sample_id) {
  const LoadedDataset data = load_dataset(data_dir);
  const auto maps = load_seed_maps(seeds_dir, data.manifest);
  if (sample_id < 0 || sample_id >= static_cast<int>(maps.size()))
    throw InvalidInputError("segments-debug: sample id out of range");
  SegmentSets sets = enumerate_valid_segments(maps[static_cast<size_t>(sample_id)], cfg.gamma,
                                              {cfg.max_pairs_per_pixel, cfg.seed});
  label_segments(sets, maps[static_cast<size_t>(sample_id)]);
  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write " + out_csv.string());
  out << "xi,yi,xj,yj,labels\n";
  for (const auto& r : sets.all) {
    out << r.a.x << "," << r.a.y << "," << r.b.x << "," << r.b.y << ",";
    bool first = true;
    for (int c = 0; c < sets.num_classes; ++c) {
      if ((r.label_mask >> c) & 1u) {
        if (!first) out << "|";
        out << c;
        first = false;
      }
    }
    out << "\n";
  }
}

void cmd_train_wsbdn(const RunConfig& cfg, const fs::path& data_dir, const fs::path& seeds_dir,
                     const fs::path& out_dir, bool labels_from_gt) {
  fs::create_directories(out_dir);
  LoadedDataset data = load_dataset(data_dir);
  const std::vector<ConfidentLabelMap> maps =
      labels_from_gt ? seed_maps_from_gt(data) : load_seed_maps(seeds_dir, data.manifest);
  WsbdnTrainResult result = train_wsbdn(cfg, data, maps);
  save_checkpoint(out_dir / "checkpoint.wsbd", result.params, &result.opt);
  std::ofstream log(out_dir / "train_log.csv");
  log << "step,lr,total,loss_ag,loss_aw\n";
  for (const auto& e : result.log)
    log << e.step << "," << format_double(e.lr) << "," << format_double(e.total) << ","
        << format_double(e.loss_ag) << "," << format_double(e.loss_aw) << "\n";
  write_config_echo(out_dir, cfg);
}

void cmd_pseudo(const RunConfig& cfg, const fs::path& data_dir, const fs::path& checkpoint,
                const fs::path& out_dir) {
  fs::create_directories(out_dir);
  LoadedDataset data = load_dataset(data_dir);
  ModelParams<float> params = zero_params<float>(cfg.net);
  load_checkpoint(checkpoint, params);
  PseudoOutputs out = compute_pseudo_labels(cfg, data, params);

  PseudoManifest pm;
  pm.num_classes = cfg.net.num_classes;
  pm.checkpoint = checkpoint.filename().string();
  pm.config_echo = run_config_to_json(cfg);
  for (size_t i = 0; i < out.labels.size(); ++i) {
    const std::string tag = sample_tag(data.manifest.samples[i].id);
    PseudoRecord rec;
    rec.id = data.manifest.samples[i].id;
    rec.soft_stem = "soft_" + tag + ".pfm";
    rec.hard_stem = "hard_" + tag + ".pgm";
    rec.threshold = out.labels[i].threshold;
    rec.degenerate = out.labels[i].degenerate_otsu;
    write_pfm_channels(out_dir / rec.soft_stem, out.labels[i].soft);
    write_boundary_channels(out_dir / rec.hard_stem, out.labels[i].hard);
    pm.records.push_back(std::move(rec));
  }
  write_pseudo_manifest(out_dir, pm);
  write_config_echo(out_dir, cfg);
}

void cmd_train_student(const RunConfig& cfg, const fs::path& data_dir, const fs::path& pseudo_dir,
                       const fs::path& out_dir, bool targets_from_gt) {
  fs::create_directories(out_dir);
  LoadedDataset data = load_dataset(data_dir);
  std::vector<BoundaryLabelMap> targets;
  if (targets_from_gt) {
    for (const Sample& s : data.samples) targets.push_back(s.gt_boundaries);
  } else {
    const PseudoManifest pm = read_pseudo_manifest(pseudo_dir);
    for (const auto& rec : data.manifest.samples) {
      const auto it = std::find_if(pm.records.begin(), pm.records.end(),
                                   [&](const PseudoRecord& p) { return p.id == rec.id; });
      if (it == pm.records.end())
        throw InvalidInputError("train-student: missing pseudo labels for sample " +
                                std::to_string(rec.id));
      targets.push_back(
          read_boundary_channels(pseudo_dir / it->hard_stem, pm.num_classes));
    }
  }
  ModelParams<float> student = train_student_model(cfg, data, targets);
  save_checkpoint(out_dir / "checkpoint.wsbd", student);
  write_config_echo(out_dir, cfg);
}

void cmd_eval(const RunConfig& cfg, const fs::path& pred_dir, const fs::path& gt_dir,
              const fs::path& out_dir) {
  fs::create_directories(out_dir);
  LoadedDataset data = load_dataset(gt_dir);
  std::vector<const BoundaryLabelMap*> gt;
  for (const Sample& s : data.samples) gt.push_back(&s.gt_boundaries);

  std::vector<MultiGridF> soft;
  std::vector<BoundaryLabelMap> hard_storage;
  std::vector<const BoundaryLabelMap*> hard;
  if (fs::exists(pred_dir / "pseudo_manifest.json")) {
    const PseudoManifest pm = read_pseudo_manifest(pred_dir);
    for (const auto& rec : data.manifest.samples) {
      const auto it = std::find_if(pm.records.begin(), pm.records.end(),
                                   [&](const PseudoRecord& p) { return p.id == rec.id; });
      if (it == pm.records.end())
        throw InvalidInputError("eval: missing predictions for sample " + std::to_string(rec.id));
      soft.push_back(read_pfm_channels(pred_dir / it->soft_stem, pm.num_classes));
      hard_storage.push_back(read_boundary_channels(pred_dir / it->hard_stem, pm.num_classes));
    }
  } else {
    // A dataset directory: evaluate its ground-truth boundaries as predictions.
    const LoadedDataset pred_data = load_dataset(pred_dir);
    for (const Sample& s : pred_data.samples) {
      MultiGridF m(s.gt_boundaries.num_classes, s.gt_boundaries.height(),
                   s.gt_boundaries.width());
      for (int c = 0; c < s.gt_boundaries.num_classes; ++c)
        m[c] = bitplane(s.gt_boundaries, c).cast<float>();
      soft.push_back(std::move(m));
      hard_storage.push_back(s.gt_boundaries);
    }
  }
  for (const auto& h : hard_storage) hard.push_back(&h);

  EvalReport report = evaluate_predictions(soft, hard, gt, cfg.eval_tolerance,
                                           cfg.eval_thresholds, cfg.threads, cfg.deterministic);
  write_eval_report(out_dir, report);
  write_config_echo(out_dir, cfg);
}

}  // namespace milb
