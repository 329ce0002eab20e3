#pragma once

#include <cmath>
#include <vector>

#include "milboundary/rng.hpp"
#include "milboundary/seeds.hpp"
#include "milboundary/segments.hpp"

namespace milb::testutil {

inline ConfidentLabelMap random_confident_map(Rng& rng, int h, int w, int C,
                                              double ignore_prob = 0.2) {
  ConfidentLabelMap m(h, w, C);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (rng.next_double() < ignore_prob) {
        m.set_ignore(y, x);
      } else {
        const auto v = rng.next_int(0, C);
        if (v == C)
          m.set_background(y, x);
        else
          m.set_class(y, x, static_cast<int>(v));
      }
    }
  return m;
}

template <typename S>
Grid<S> random_grid(Rng& rng, int h, int w, double lo = 0.05, double hi = 0.95) {
  Grid<S> g(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g(y, x) = static_cast<S>(rng.next_range(lo, hi));
  return g;
}

template <typename S>
MultiGrid<S> random_multigrid(Rng& rng, int C, int h, int w, double lo = 0.05, double hi = 0.95) {
  MultiGrid<S> m(C, h, w);
  for (int c = 0; c < C; ++c) m[c] = random_grid<S>(rng, h, w, lo, hi);
  return m;
}

// Raster index of the argmax pixel of every bag; finite-difference probes
// are only valid when this fingerprint is identical at both evaluation
// points (otherwise the probe straddles an argmax tie).
template <typename S>
std::vector<int32_t> bag_argmax_fingerprint(const Grid<S>& map, const SegmentSets& sets) {
  std::vector<int32_t> out;
  out.reserve(sets.all.size());
  std::vector<PixelCoord> buf(64);
  const int w = static_cast<int>(map.cols());
  for (const auto& r : sets.all) {
    const int n = rasterize_line_into(r.a, r.b, buf.data(), 64);
    int arg = 0;
    S best = map(buf[0].y, buf[0].x);
    for (int i = 1; i < n; ++i) {
      const S v = map(buf[static_cast<size_t>(i)].y, buf[static_cast<size_t>(i)].x);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out.push_back(buf[static_cast<size_t>(arg)].y * w + buf[static_cast<size_t>(arg)].x);
  }
  return out;
}

// Smallest gap between the top-2 values over each segment (per channel);
// finite-difference checks need this to stay well above the step size.
template <typename S>
double min_bag_tie_gap(const Grid<S>& map, const SegmentSets& sets) {
  double min_gap = 1e9;
  std::vector<PixelCoord> buf(64);
  for (const auto& r : sets.all) {
    const int n = rasterize_line_into(r.a, r.b, buf.data(), 64);
    if (n < 2) continue;
    double best = -1e9, second = -1e9;
    for (int i = 0; i < n; ++i) {
      const double v = static_cast<double>(map(buf[static_cast<size_t>(i)].y,
                                               buf[static_cast<size_t>(i)].x));
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
    }
    min_gap = std::min(min_gap, best - second);
  }
  return min_gap;
}

}  // namespace milb::testutil
