#pragma once

#include <algorithm>
#include <cmath>

#include "milboundary/grid.hpp"

namespace milb {

// Clamps negatives to zero, then divides by the global maximum so the peak
// score is exactly 1. An all-zero (or all-negative) map stays all-zero.
template <typename Derived>
Grid<typename Derived::Scalar> normalize_cam(const Eigen::MatrixBase<Derived>& raw) {
  using S = typename Derived::Scalar;
  if (raw.rows() == 0 || raw.cols() == 0) throw InvalidInputError("normalize_cam: empty map");
  if (!raw.allFinite()) throw InvalidInputError("normalize_cam: non-finite values");
  Grid<S> out = raw.cwiseMax(S(0));
  S mx = out.maxCoeff();
  if (mx > S(0)) out /= mx;
  return out;
}

// Boundary bit (x,c) is set iff mask(x)=c and some 8-neighbor has a different
// label. The image border itself does not count as a neighbor, and background
// produces no channel.
inline BoundaryLabelMap extract_boundaries(const SegMask& mask) {
  const int h = mask.height(), w = mask.width();
  BoundaryLabelMap out(h, w, mask.num_classes);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint8_t lab = mask.labels(y, x);
      if (lab == kBackgroundLabel) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (mask.labels(ny, nx) != lab) {
            edge = true;
            break;
          }
        }
      }
      if (edge) out.set(y, x, lab);
    }
  }
  return out;
}

namespace detail {

struct ResizeTap {
  int lo = 0, hi = 0;
  double frac = 0.0;  // weight of hi; (1 - frac) goes to lo
};

// align-corners-false source position for target index t.
inline ResizeTap resize_tap(int t, int src_size, int dst_size) {
  double s = (static_cast<double>(t) + 0.5) * static_cast<double>(src_size) /
                 static_cast<double>(dst_size) -
             0.5;
  ResizeTap tap;
  double fl = std::floor(s);
  tap.frac = s - fl;
  tap.lo = std::clamp(static_cast<int>(fl), 0, src_size - 1);
  tap.hi = std::clamp(static_cast<int>(fl) + 1, 0, src_size - 1);
  return tap;
}

}  // namespace detail

// Bilinear resampling, align-corners-false, edge taps clamped. The identity
// when target dims equal source dims.
template <typename Scalar>
Grid<Scalar> resize_bilinear(const Grid<Scalar>& map, int new_width, int new_height) {
  const int sw = static_cast<int>(map.cols()), sh = static_cast<int>(map.rows());
  if (new_width < 1 || new_height < 1)
    throw InvalidInputError("resize_bilinear: target dims must be >= 1");
  if (sw == 0 || sh == 0) throw InvalidInputError("resize_bilinear: empty source");
  if (new_width == sw && new_height == sh) return map;

  std::vector<detail::ResizeTap> xt(static_cast<size_t>(new_width));
  for (int x = 0; x < new_width; ++x) xt[static_cast<size_t>(x)] = detail::resize_tap(x, sw, new_width);
  Grid<Scalar> out(new_height, new_width);
  for (int y = 0; y < new_height; ++y) {
    const auto ty = detail::resize_tap(y, sh, new_height);
    for (int x = 0; x < new_width; ++x) {
      const auto& tx = xt[static_cast<size_t>(x)];
      const double v00 = static_cast<double>(map(ty.lo, tx.lo));
      const double v01 = static_cast<double>(map(ty.lo, tx.hi));
      const double v10 = static_cast<double>(map(ty.hi, tx.lo));
      const double v11 = static_cast<double>(map(ty.hi, tx.hi));
      const double top = v00 + (v01 - v00) * tx.frac;
      const double bot = v10 + (v11 - v10) * tx.frac;
      out(y, x) = static_cast<Scalar>(top + (bot - top) * ty.frac);
    }
  }
  return out;
}

template <typename Scalar>
Grid<Scalar> mirror_horizontal(const Grid<Scalar>& map) {
  return map.rowwise().reverse();
}

inline SegMask mirror_horizontal(const SegMask& mask) {
  return SegMask{mask.labels.rowwise().reverse(), mask.num_classes};
}

inline BoundaryLabelMap mirror_horizontal(const BoundaryLabelMap& map) {
  BoundaryLabelMap out;
  out.bits = map.bits.rowwise().reverse();
  out.num_classes = map.num_classes;
  return out;
}

inline Image8 mirror_horizontal(const Image8& img) {
  Image8 out;
  for (int k = 0; k < 3; ++k) out.channels[k] = img.channels[k].rowwise().reverse();
  return out;
}

// Separable Gaussian blur, kernel truncated at 3*sigma and normalized,
// zero padding outside the grid. sigma <= 0 is the identity.
template <typename Scalar>
Grid<Scalar> gaussian_blur(const Grid<Scalar>& map, double sigma) {
  if (sigma <= 0.0) return map;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));
    k[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;

  const int h = static_cast<int>(map.rows()), w = static_cast<int>(map.cols());
  Grid<Scalar> tmp = Grid<Scalar>::Zero(h, w), out = Grid<Scalar>::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sx = x + i;
        if (sx < 0 || sx >= w) continue;
        acc += k[static_cast<size_t>(i + radius)] * static_cast<double>(map(y, sx));
      }
      tmp(y, x) = static_cast<Scalar>(acc);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sy = y + i;
        if (sy < 0 || sy >= h) continue;
        acc += k[static_cast<size_t>(i + radius)] * static_cast<double>(tmp(sy, x));
      }
      out(y, x) = static_cast<Scalar>(acc);
    }
  }
  return out;
}

}  // namespace milb
