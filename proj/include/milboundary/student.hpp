#pragma once

#include "milboundary/grid.hpp"
#include "milboundary/mil.hpp"
#include "milboundary/net.hpp"

namespace milb {

struct PixelLossConfig {
  double eps = kProbClamp;
};

template <typename S>
struct BceResult {
  double value = 0.0;
  MultiGrid<S> grad;
  std::vector<double> beta;  // per-class positive weight |negatives|/|pixels|
};

// Class-balanced binary cross entropy against hard boundary bits, averaged
// over classes. beta_c is recomputed per image from the target's counts; a
// class with no positives gets beta = 1, which makes both terms vanish for
// an all-negative prediction of ~eps.
template <typename S>
BceResult<S> balanced_bce(const MultiGrid<S>& pred, const BoundaryLabelMap& target,
                          const PixelLossConfig& cfg = {}) {
  const int C = pred.num_channels();
  const int h = pred.height(), w = pred.width();
  if (C != target.num_classes || h != target.height() || w != target.width())
    throw InvalidInputError("balanced_bce: dimension mismatch");
  BceResult<S> out;
  out.grad = MultiGrid<S>(C, h, w);
  out.beta.resize(static_cast<size_t>(C));
  const double n_px = static_cast<double>(h) * w;
  double total = 0.0;
  for (int c = 0; c < C; ++c) {
    int64_t n_pos = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) n_pos += target.test(y, x, c) ? 1 : 0;
    const double beta = (n_px - static_cast<double>(n_pos)) / n_px;
    out.beta[static_cast<size_t>(c)] = beta;
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double p = std::clamp(static_cast<double>(pred[c](y, x)), cfg.eps, 1.0 - cfg.eps);
        const bool t = target.test(y, x, c);
        if (t)
          acc -= beta * std::log(p);
        else
          acc -= (1.0 - beta) * std::log(1.0 - p);
        const double g = t ? -beta / p : (1.0 - beta) / (1.0 - p);
        out.grad[c](y, x) = static_cast<S>(g / (n_px * C));
      }
    }
    total += acc / n_px;
  }
  out.value = total / C;
  return out;
}

}  // namespace milb
