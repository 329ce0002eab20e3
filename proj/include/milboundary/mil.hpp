#pragma once

#include <cmath>
#include <vector>

#include "milboundary/grid.hpp"
#include "milboundary/segments.hpp"

namespace milb {

inline constexpr double kProbClamp = 1e-7;

template <typename S>
struct BagScore {
  S value = S(0);
  PixelCoord argmax_pixel;
  uint32_t segment_id = 0;
  int class_id = -1;  // -1 marks the class-agnostic map
};

// Max-aggregated bag score over the segment's rasterized pixels; ties go to
// the first occurrence in rasterization order from the first endpoint.
template <typename S>
BagScore<S> bag_score(const Grid<S>& map, const LineSegment& seg) {
  if (seg.pixels.empty()) throw std::logic_error("bag_score: empty pixel list");
  BagScore<S> best;
  best.value = map(seg.pixels[0].y, seg.pixels[0].x);
  best.argmax_pixel = seg.pixels[0];
  for (size_t i = 1; i < seg.pixels.size(); ++i) {
    const S v = map(seg.pixels[i].y, seg.pixels[i].x);
    if (v > best.value) {
      best.value = v;
      best.argmax_pixel = seg.pixels[i];
    }
  }
  return best;
}

template <typename S>
struct LossGrad {
  double value = 0.0;
  Grid<S> grad;
  bool warn_empty_positive = false;
  bool warn_empty_negative = false;
};

template <typename S>
struct MultiLossGrad {
  double value = 0.0;
  MultiGrid<S> grad;
  std::vector<double> per_class;
  bool warn_empty_positive = false;
  bool warn_empty_negative = false;
};

template <typename S>
struct LossBreakdown {
  double loss_ag = 0.0;
  double loss_aw = 0.0;
  double lambda = 0.25;
  double total = 0.0;
  Grid<S> grad_ag;       // already scaled by lambda
  MultiGrid<S> grad_aw;
  bool warn_empty_sets = false;
};

namespace detail {

// Max over the segment's pixels of one channel, tracking the argmax index
// into the rasterized buffer.
template <typename S>
inline S scan_max(const Grid<S>& map, const PixelCoord* px, int n, int& arg) {
  S best = map(px[0].y, px[0].x);
  arg = 0;
  for (int i = 1; i < n; ++i) {
    const S v = map(px[i].y, px[i].x);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return best;
}

inline int raster_capacity(double gamma) { return static_cast<int>(std::ceil(gamma)) + 2; }

}  // namespace detail

// Class-agnostic MIL loss: positive and negative bags normalized separately.
// Gradient lands only on argmax pixels. Empty positive or negative sets drop
// that term and set a warning flag.
template <typename S>
LossGrad<S> loss_ag(const Grid<S>& b_ag, const SegmentSets& sets, double eps = kProbClamp) {
  LossGrad<S> out;
  out.grad = Grid<S>::Zero(b_ag.rows(), b_ag.cols());
  const size_t n_pos = sets.num_positive_union();
  const size_t n_neg = sets.num_negative_intersection();
  out.warn_empty_positive = n_pos == 0;
  out.warn_empty_negative = n_neg == 0;

  std::vector<PixelCoord> buf(static_cast<size_t>(detail::raster_capacity(sets.gamma)));
  double acc = 0.0;
  for (uint32_t i = 0; i < sets.all.size(); ++i) {
    const SegmentRecord& r = sets.all[i];
    const int n = rasterize_line_into(r.a, r.b, buf.data(), static_cast<int>(buf.size()));
    int arg = 0;
    const double b = static_cast<double>(detail::scan_max(b_ag, buf.data(), n, arg));
    const double bc = std::clamp(b, eps, 1.0 - eps);
    const PixelCoord am = buf[static_cast<size_t>(arg)];
    if (r.label_mask != 0) {
      if (n_pos == 0) continue;
      acc -= std::log(bc) / static_cast<double>(n_pos);
      out.grad(am.y, am.x) += static_cast<S>(-1.0 / (bc * static_cast<double>(n_pos)));
    } else {
      if (n_neg == 0) continue;
      acc -= std::log(1.0 - bc) / static_cast<double>(n_neg);
      out.grad(am.y, am.x) += static_cast<S>(1.0 / ((1.0 - bc) * static_cast<double>(n_neg)));
    }
  }
  out.value = acc;
  return out;
}

// Class-aware MIL loss, normalized independently per class then averaged
// over classes (Eq. 6 shape). Every segment is a negative for each class it
// does not cross.
template <typename S>
MultiLossGrad<S> loss_aw(const MultiGrid<S>& b_aw, const SegmentSets& sets,
                         double eps = kProbClamp) {
  const int C = b_aw.num_channels();
  if (C == 0) throw InvalidInputError("loss_aw: zero classes");
  MultiLossGrad<S> out;
  out.grad = MultiGrid<S>(C, b_aw.height(), b_aw.width());
  out.per_class.assign(static_cast<size_t>(C), 0.0);

  std::vector<size_t> n_pos(static_cast<size_t>(C)), n_neg(static_cast<size_t>(C));
  for (int c = 0; c < C; ++c) {
    n_pos[static_cast<size_t>(c)] = sets.num_positive(c);
    n_neg[static_cast<size_t>(c)] = sets.num_negative(c);
    if (n_pos[static_cast<size_t>(c)] == 0) out.warn_empty_positive = true;
    if (n_neg[static_cast<size_t>(c)] == 0) out.warn_empty_negative = true;
  }

  const double inv_c = 1.0 / static_cast<double>(C);
  std::vector<PixelCoord> buf(static_cast<size_t>(detail::raster_capacity(sets.gamma)));
  for (uint32_t i = 0; i < sets.all.size(); ++i) {
    const SegmentRecord& r = sets.all[i];
    const int n = rasterize_line_into(r.a, r.b, buf.data(), static_cast<int>(buf.size()));
    for (int c = 0; c < C; ++c) {
      int arg = 0;
      const double b = static_cast<double>(detail::scan_max(b_aw[c], buf.data(), n, arg));
      const double bc = std::clamp(b, eps, 1.0 - eps);
      const PixelCoord am = buf[static_cast<size_t>(arg)];
      const bool positive = (r.label_mask >> c) & 1u;
      if (positive) {
        const auto np = static_cast<double>(n_pos[static_cast<size_t>(c)]);
        const double term = -std::log(bc) / np;
        out.per_class[static_cast<size_t>(c)] += term;
        out.grad[c](am.y, am.x) += static_cast<S>(-inv_c / (bc * np));
      } else {
        if (n_neg[static_cast<size_t>(c)] == 0) continue;
        const auto nn = static_cast<double>(n_neg[static_cast<size_t>(c)]);
        const double term = -std::log(1.0 - bc) / nn;
        out.per_class[static_cast<size_t>(c)] += term;
        out.grad[c](am.y, am.x) += static_cast<S>(inv_c / ((1.0 - bc) * nn));
      }
    }
  }
  double acc = 0.0;
  for (double v : out.per_class) acc += v;
  out.value = acc * inv_c;
  return out;
}

// Total training loss: L = L_aw + lambda * L_ag, with the class-agnostic
// gradient pre-scaled by lambda.
template <typename S>
LossBreakdown<S> total_loss(const Grid<S>& b_ag, const MultiGrid<S>& b_aw,
                            const SegmentSets& sets, double lambda, double eps = kProbClamp) {
  if (lambda < 0) throw InvalidInputError("total_loss: lambda must be >= 0");
  LossGrad<S> ag = loss_ag(b_ag, sets, eps);
  MultiLossGrad<S> aw = loss_aw(b_aw, sets, eps);
  LossBreakdown<S> out;
  out.loss_ag = ag.value;
  out.loss_aw = aw.value;
  out.lambda = lambda;
  out.total = aw.value + lambda * ag.value;
  out.grad_ag = (ag.grad * static_cast<S>(lambda)).eval();
  out.grad_aw = std::move(aw.grad);
  out.warn_empty_sets = ag.warn_empty_positive || ag.warn_empty_negative ||
                        aw.warn_empty_positive || aw.warn_empty_negative;
  return out;
}

}  // namespace milb
