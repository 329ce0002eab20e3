#pragma once

#include <vector>

#include "milboundary/grid.hpp"

namespace milb {

struct MatchConfig {
  double tolerance = 2.0;  // pixels; or as a fraction of the diagonal via helper below

  void validate() const {
    if (tolerance <= 0) throw ConfigError("eval.tolerance", "must be > 0");
  }
};

inline double tolerance_from_fraction(double fraction, int height, int width) {
  return fraction * std::sqrt(static_cast<double>(height) * height +
                              static_cast<double>(width) * width);
}

struct MatchCounts {
  int64_t tp = 0, fp = 0, fn = 0;
  int64_t greedy_tp = 0;  // before augmentation; discrepancies vs tp are logged by callers

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    greedy_tp += o.greedy_tp;
    return *this;
  }
};

// One-to-one matching of prediction pixels to ground-truth pixels within
// Euclidean distance <= tol: pairs are taken greedily in (distance, pred
// raster, gt raster) order, then completed to maximum cardinality with
// augmenting paths so counts are independent of tie order.
MatchCounts match_boundaries(const GridU8& pred, const GridU8& gt, double tol);

struct PrCurve {
  std::vector<double> thresholds;
  std::vector<MatchCounts> counts;  // dataset-summed per threshold
  std::vector<double> precision, recall, f;

  void finalize();  // fills precision/recall/f from counts
};

// Dataset-level PR curve: thresholds uniform on (0,1), each binarizing every
// sample's soft map (score >= t) before matching; counts are summed over the
// dataset.
PrCurve pr_curve(const std::vector<GridF>& soft_preds, const std::vector<GridU8>& gts,
                 double tol, int n_thresholds = 99);

struct MfResult {
  double mf = 0.0;
  double best_threshold = 0.0;
  size_t best_index = 0;
};

// Maximum F-measure at a single dataset-shared threshold (ODS convention).
MfResult mf_ods(const PrCurve& curve);

// Area under the PR curve over recall, with precision made monotone from
// high recall to low (interpolated precision) and trapezoidal integration.
double average_precision(const PrCurve& curve);

inline double f_measure(double precision, double recall) {
  const double d = precision + recall;
  return d > 0 ? 2.0 * precision * recall / d : 0.0;
}

// Helpers for class-agnostic evaluation of per-class maps.
GridU8 or_channels(const BoundaryLabelMap& map);
GridF max_channels(const MultiGridF& maps);
GridU8 bitplane(const BoundaryLabelMap& map, int c);
GridU8 binarize(const GridF& soft, double threshold);  // score >= threshold

}  // namespace milb
