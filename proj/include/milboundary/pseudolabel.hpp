#pragma once

#include <vector>

#include "milboundary/grid.hpp"
#include "milboundary/imaging.hpp"
#include "milboundary/net.hpp"

namespace milb {

struct MsfConfig {
  std::vector<double> scales{0.75, 1.0, 1.25};
  bool use_flip = true;

  void validate() const {
    if (scales.empty()) throw ConfigError("msf.scales", "must be non-empty");
    for (double s : scales)
      if (s <= 0) throw ConfigError("msf.scales", "must be > 0");
  }
};

struct NmsConfig {
  int radius = 10;
  double multiplier = 1.1;
  double smooth_sigma = 1.0;

  void validate() const {
    if (radius < 1) throw ConfigError("nms.radius", "must be >= 1");
    if (multiplier < 1.0) throw ConfigError("nms.multiplier", "must be >= 1");
    if (smooth_sigma < 0) throw ConfigError("nms.smooth_sigma", "must be >= 0");
  }
};

template <typename S>
struct Prediction {
  Grid<S> b_ag;
  MultiGrid<S> b_aw;
  MultiGrid<S> b_final;
};

// Multi-scale / flip inference: each pass is resized back to the original
// resolution (and un-flipped), branch maps are averaged arithmetically, and
// the final map is recomputed as the product of the aggregated branches.
template <typename S>
Prediction<S> msf_predict(const ModelParams<S>& params, const Image8& image,
                          const MsfConfig& msf) {
  msf.validate();
  const int H = image.height(), W = image.width();
  const int C = params.cfg.num_classes;
  std::array<Grid<S>, 3> base;
  for (int c = 0; c < 3; ++c)
    base[static_cast<size_t>(c)] =
        image.channels[static_cast<size_t>(c)].template cast<S>() / S(255);

  Grid<S> sum_ag = Grid<S>::Zero(H, W);
  MultiGrid<S> sum_aw(C, H, W);
  int passes = 0;
  for (double scale : msf.scales) {
    const int th = std::max(8, static_cast<int>(std::lround(H * scale)));
    const int tw = std::max(8, static_cast<int>(std::lround(W * scale)));
    for (int flip = 0; flip < (msf.use_flip ? 2 : 1); ++flip) {
      std::array<Grid<S>, 3> chans;
      for (int c = 0; c < 3; ++c) {
        Grid<S> g = base[static_cast<size_t>(c)];
        if (flip) g = mirror_horizontal(g);
        chans[static_cast<size_t>(c)] = resize_bilinear(g, tw, th);
      }
      NetOutputs<S> out = forward(params, grids_to_features<S>(chans));
      Grid<S> ag = resize_bilinear(out.b_ag, W, H);
      if (flip) ag = mirror_horizontal(ag);
      sum_ag += ag;
      for (int c = 0; c < C; ++c) {
        Grid<S> aw = resize_bilinear(out.b_aw[c], W, H);
        if (flip) aw = mirror_horizontal(aw);
        sum_aw[c] += aw;
      }
      ++passes;
    }
  }
  Prediction<S> pred;
  pred.b_ag = sum_ag / static_cast<S>(passes);
  pred.b_aw = MultiGrid<S>(C, H, W);
  pred.b_final = MultiGrid<S>(C, H, W);
  for (int c = 0; c < C; ++c) {
    pred.b_aw[c] = sum_aw[c] / static_cast<S>(passes);
    pred.b_final[c] = pred.b_aw[c].cwiseProduct(pred.b_ag);
  }
  return pred;
}

// Zeroes the channels of classes not present in image_labels.
template <typename S>
MultiGrid<S> filter_irrelevant_classes(const MultiGrid<S>& maps,
                                       const std::vector<int>& image_labels) {
  MultiGrid<S> out = maps;
  std::vector<char> keep(static_cast<size_t>(maps.num_channels()), 0);
  for (int c : image_labels) {
    if (c < 0 || c >= maps.num_channels())
      throw InvalidInputError("filter_irrelevant_classes: label out of range");
    keep[static_cast<size_t>(c)] = 1;
  }
  for (int c = 0; c < maps.num_channels(); ++c)
    if (!keep[static_cast<size_t>(c)]) out[c].setZero();
  return out;
}

// Canny-style edge thinning with a conservative multiplier: a pixel survives
// iff multiplier * score(x) >= the bilinear sample at every integer offset
// 1..radius along both directions of the boundary normal (estimated from
// Sobel gradients of the sigma-smoothed map; near-zero gradient keeps the
// pixel). Out-of-bounds samples read 0. Survivors keep their original score.
GridF nms_thin(const GridF& score, const NmsConfig& cfg);

struct OtsuResult {
  double threshold = 0.0;
  bool degenerate = false;  // all inputs equal (threshold = that value)
};

// 256-candidate Otsu: thresholds t_k = min + k*(max-min)/256, k = 0..255;
// returns the candidate maximizing between-class variance of the split
// {v < t} / {v >= t}; ties go to the lower threshold.
OtsuResult otsu_threshold(const std::vector<float>& scores);

struct PseudoLabels {
  BoundaryLabelMap hard;
  MultiGridF soft;  // post-filter, pre-NMS final map
  double threshold = 0.0;
  bool degenerate_otsu = false;
};

// Full pseudo-label pipeline: MSF inference, class filtering, per-channel NMS
// thinning, per-image Otsu over pooled surviving scores, bit set where the
// surviving score clears the threshold. apply_nms = false skips the thinning
// step (Otsu then runs on the raw positive scores).
PseudoLabels make_pseudo_labels(const ModelParams<float>& params, const Image8& image,
                                const std::vector<int>& image_labels, const MsfConfig& msf,
                                const NmsConfig& nms, bool apply_nms = true);

}  // namespace milb
