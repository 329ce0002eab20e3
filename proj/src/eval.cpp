#include "milboundary/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace milb {

namespace {

std::vector<PixelCoord> collect(const GridU8& bits) {
  std::vector<PixelCoord> out;
  for (int y = 0; y < bits.rows(); ++y)
    for (int x = 0; x < bits.cols(); ++x)
      if (bits(y, x)) out.push_back({static_cast<int16_t>(x), static_cast<int16_t>(y)});
  return out;
}

// Offsets with dx^2+dy^2 <= tol^2 grouped by squared distance ascending;
// within a group offsets are in (dy, dx) raster order.
std::vector<std::vector<PixelCoord>> offsets_by_d2(double tol) {
  const int r = static_cast<int>(std::floor(tol));
  std::vector<std::pair<int, PixelCoord>> flat;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (static_cast<double>(d2) <= tol * tol)
        flat.push_back({d2, {static_cast<int16_t>(dx), static_cast<int16_t>(dy)}});
    }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<PixelCoord>> groups;
  int last_d2 = -1;
  for (const auto& [d2, off] : flat) {
    if (d2 != last_d2) {
      groups.emplace_back();
      last_d2 = d2;
    }
    groups.back().push_back(off);
  }
  return groups;
}

}  // namespace

MatchCounts match_boundaries(const GridU8& pred, const GridU8& gt, double tol) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw InvalidInputError("match_boundaries: dimension mismatch");
  MatchConfig{tol}.validate();
  const int h = static_cast<int>(pred.rows()), w = static_cast<int>(pred.cols());

  const std::vector<PixelCoord> preds = collect(pred);
  const std::vector<PixelCoord> gts = collect(gt);
  MatchCounts counts;
  if (preds.empty() || gts.empty()) {
    counts.fp = static_cast<int64_t>(preds.size());
    counts.fn = static_cast<int64_t>(gts.size());
    return counts;
  }

  Grid<int32_t> gt_id = Grid<int32_t>::Constant(h, w, -1);
  for (size_t i = 0; i < gts.size(); ++i) gt_id(gts[i].y, gts[i].x) = static_cast<int32_t>(i);

  std::vector<int32_t> pred_match(preds.size(), -1);
  std::vector<int32_t> gt_match(gts.size(), -1);

  // Greedy phase: ascending distance, ties in (pred raster, gt raster) order.
  const auto groups = offsets_by_d2(tol);
  int64_t matched = 0;
  for (const auto& group : groups) {
    for (size_t pi = 0; pi < preds.size(); ++pi) {
      if (pred_match[pi] >= 0) continue;
      const PixelCoord p = preds[pi];
      for (const PixelCoord off : group) {
        const int gy = p.y + off.y, gx = p.x + off.x;
        if (gy < 0 || gy >= h || gx < 0 || gx >= w) continue;
        const int32_t gi = gt_id(gy, gx);
        if (gi < 0 || gt_match[static_cast<size_t>(gi)] >= 0) continue;
        pred_match[pi] = gi;
        gt_match[static_cast<size_t>(gi)] = static_cast<int32_t>(pi);
        ++matched;
        break;
      }
      // A pred matched in this distance group stops scanning further groups
      // via the pred_match guard above.
    }
  }
  counts.greedy_tp = matched;

  // Augmentation phase: complete to maximum cardinality so the count does
  // not depend on tie order.
  std::vector<std::vector<int32_t>> adj(gts.size());
  auto build_adj = [&]() {
    Grid<int32_t> pred_id = Grid<int32_t>::Constant(h, w, -1);
    for (size_t i = 0; i < preds.size(); ++i)
      pred_id(preds[i].y, preds[i].x) = static_cast<int32_t>(i);
    for (size_t gi = 0; gi < gts.size(); ++gi) {
      for (const auto& group : groups) {
        for (const PixelCoord off : group) {
          const int py = gts[gi].y + off.y, px = gts[gi].x + off.x;
          if (py < 0 || py >= h || px < 0 || px >= w) continue;
          const int32_t pi = pred_id(py, px);
          if (pi >= 0) adj[gi].push_back(pi);
        }
      }
    }
  };
  bool adj_built = false;
  std::vector<char> visited(preds.size());
  // Kuhn augmenting path from the gt side.
  std::function<bool(int32_t)> try_augment = [&](int32_t gi) -> bool {
    for (int32_t pi : adj[static_cast<size_t>(gi)]) {
      if (visited[static_cast<size_t>(pi)]) continue;
      visited[static_cast<size_t>(pi)] = 1;
      if (pred_match[static_cast<size_t>(pi)] < 0 ||
          try_augment(pred_match[static_cast<size_t>(pi)])) {
        pred_match[static_cast<size_t>(pi)] = gi;
        gt_match[static_cast<size_t>(gi)] = pi;
        return true;
      }
    }
    return false;
  };
  for (size_t gi = 0; gi < gts.size(); ++gi) {
    if (gt_match[gi] >= 0) continue;
    if (!adj_built) {
      build_adj();
      adj_built = true;
    }
    std::fill(visited.begin(), visited.end(), 0);
    if (try_augment(static_cast<int32_t>(gi))) ++matched;
  }

  counts.tp = matched;
  counts.fp = static_cast<int64_t>(preds.size()) - matched;
  counts.fn = static_cast<int64_t>(gts.size()) - matched;
  return counts;
}

void PrCurve::finalize() {
  precision.resize(counts.size());
  recall.resize(counts.size());
  f.resize(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    const auto& c = counts[i];
    precision[i] = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    recall[i] = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    f[i] = f_measure(precision[i], recall[i]);
  }
}

GridU8 binarize(const GridF& soft, double threshold) {
  return (soft.array() >= static_cast<float>(threshold)).cast<uint8_t>();
}

PrCurve pr_curve(const std::vector<GridF>& soft_preds, const std::vector<GridU8>& gts,
                 double tol, int n_thresholds) {
  if (soft_preds.empty() || soft_preds.size() != gts.size())
    throw InvalidInputError("pr_curve: need >= 1 sample with matching gt");
  PrCurve curve;
  curve.thresholds.resize(static_cast<size_t>(n_thresholds));
  curve.counts.assign(static_cast<size_t>(n_thresholds), {});
  for (int i = 0; i < n_thresholds; ++i)
    curve.thresholds[static_cast<size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(n_thresholds + 1);
  for (size_t s = 0; s < soft_preds.size(); ++s) {
    for (int i = 0; i < n_thresholds; ++i) {
      const GridU8 pred = binarize(soft_preds[s], curve.thresholds[static_cast<size_t>(i)]);
      curve.counts[static_cast<size_t>(i)] += match_boundaries(pred, gts[s], tol);
    }
  }
  curve.finalize();
  return curve;
}

MfResult mf_ods(const PrCurve& curve) {
  if (curve.thresholds.empty()) throw InvalidInputError("mf_ods: empty curve");
  MfResult r;
  for (size_t i = 0; i < curve.f.size(); ++i) {
    if (curve.f[i] > r.mf) {
      r.mf = curve.f[i];
      r.best_threshold = curve.thresholds[i];
      r.best_index = i;
    }
  }
  if (curve.f.empty()) return r;
  if (r.mf == 0.0) r.best_threshold = curve.thresholds[0];
  return r;
}

double average_precision(const PrCurve& curve) {
  if (curve.thresholds.empty()) throw InvalidInputError("average_precision: empty curve");
  std::vector<size_t> order(curve.thresholds.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return curve.recall[a] < curve.recall[b]; });
  std::vector<double> r(order.size()), p(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    r[i] = curve.recall[order[i]];
    p[i] = curve.precision[order[i]];
  }
  // Interpolated precision: monotone non-increasing as recall grows.
  for (size_t i = order.size(); i-- > 1;) p[i - 1] = std::max(p[i - 1], p[i]);
  double ap = 0.0;
  double prev_r = 0.0, prev_p = p.empty() ? 0.0 : p[0];
  for (size_t i = 0; i < order.size(); ++i) {
    ap += 0.5 * (p[i] + prev_p) * (r[i] - prev_r);
    prev_r = r[i];
    prev_p = p[i];
  }
  return ap;
}

GridU8 or_channels(const BoundaryLabelMap& map) {
  return (map.bits.array() != 0u).cast<uint8_t>();
}

GridF max_channels(const MultiGridF& maps) {
  GridF out = GridF::Zero(maps.height(), maps.width());
  for (int c = 0; c < maps.num_channels(); ++c) out = out.cwiseMax(maps[c]);
  return out;
}

GridU8 bitplane(const BoundaryLabelMap& map, int c) {
  return map.bits.unaryExpr(
      [c](uint32_t v) { return static_cast<uint8_t>((v >> c) & 1u); });
}

}  // namespace milb
