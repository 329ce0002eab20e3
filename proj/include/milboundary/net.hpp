#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "milboundary/grid.hpp"
#include "milboundary/imaging.hpp"
#include "milboundary/mil.hpp"
#include "milboundary/rng.hpp"

namespace milb {

// Feature maps are stored channels-by-pixels, row-major: row c is channel c
// flattened to h*w.
template <typename S>
using FeatMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename S>
struct FeatureMap {
  FeatMat<S> data;
  int h = 0, w = 0;
  int channels() const { return static_cast<int>(data.rows()); }
};

struct NetConfig {
  int input_size = 64;
  std::array<int, 4> stage_channels{16, 32, 64, 64};
  std::array<int, 4> stage_strides{1, 2, 2, 1};
  int proj_channels = 8;   // branch-1 per-stage projection width
  int head_channels = 16;  // branch-1 hidden width
  int num_classes = 3;

  void validate() const {
    for (int s : stage_strides)
      if (s != 1 && s != 2) throw ConfigError("net.stage_strides", "strides must be 1 or 2");
    for (int c : stage_channels)
      if (c < 1) throw ConfigError("net.stage_channels", "must be >= 1");
    if (input_size < 8) throw ConfigError("net.input_size", "must be >= 8");
    if (proj_channels < 1) throw ConfigError("net.proj_channels", "must be >= 1");
    if (head_channels < 1) throw ConfigError("net.head_channels", "must be >= 1");
    if (num_classes < 1) throw ConfigError("net.num_classes", "must be >= 1");
  }
};

enum TensorId : int {
  kS1W, kS1B, kS2W, kS2B, kS3W, kS3B, kS4W, kS4B,
  kP1W, kP1B, kP2W, kP2B, kP3W, kP3B,
  kH1W, kH1B, kH2W, kH2B,
  kAwW, kAwB,
  kNumTensors
};

inline const char* tensor_name(int id) {
  static constexpr const char* kNames[kNumTensors] = {
      "backbone.s1.weight", "backbone.s1.bias", "backbone.s2.weight", "backbone.s2.bias",
      "backbone.s3.weight", "backbone.s3.bias", "backbone.s4.weight", "backbone.s4.bias",
      "branch_ag.proj1.weight", "branch_ag.proj1.bias", "branch_ag.proj2.weight",
      "branch_ag.proj2.bias", "branch_ag.proj3.weight", "branch_ag.proj3.bias",
      "branch_ag.head1.weight", "branch_ag.head1.bias", "branch_ag.head2.weight",
      "branch_ag.head2.bias", "branch_aw.conv.weight", "branch_aw.conv.bias"};
  return kNames[id];
}

inline bool tensor_is_branch_ag(int id) { return id >= kP1W && id <= kH2B; }
inline bool tensor_is_branch_aw(int id) { return id == kAwW || id == kAwB; }

template <typename S>
struct Tensor {
  std::vector<uint32_t> dims;  // {oc, ic, kh, kw} for weights, {oc} for bias
  FeatMat<S> value;            // weights (oc, ic*kh*kw); bias (oc, 1)
};

template <typename S>
struct ModelParams {
  NetConfig cfg;
  std::array<Tensor<S>, kNumTensors> tensors;

  Tensor<S>& t(int id) { return tensors[static_cast<size_t>(id)]; }
  const Tensor<S>& t(int id) const { return tensors[static_cast<size_t>(id)]; }
};

namespace netdetail {

template <typename S>
Tensor<S> make_conv(int oc, int ic, int k) {
  Tensor<S> t;
  t.dims = {static_cast<uint32_t>(oc), static_cast<uint32_t>(ic), static_cast<uint32_t>(k),
            static_cast<uint32_t>(k)};
  t.value = FeatMat<S>::Zero(oc, ic * k * k);
  return t;
}

template <typename S>
Tensor<S> make_bias(int oc) {
  Tensor<S> t;
  t.dims = {static_cast<uint32_t>(oc)};
  t.value = FeatMat<S>::Zero(oc, 1);
  return t;
}

}  // namespace netdetail

template <typename S>
ModelParams<S> zero_params(const NetConfig& cfg) {
  cfg.validate();
  using netdetail::make_bias;
  using netdetail::make_conv;
  ModelParams<S> p;
  p.cfg = cfg;
  const auto& ch = cfg.stage_channels;
  p.t(kS1W) = make_conv<S>(ch[0], 3, 3);
  p.t(kS1B) = make_bias<S>(ch[0]);
  p.t(kS2W) = make_conv<S>(ch[1], ch[0], 3);
  p.t(kS2B) = make_bias<S>(ch[1]);
  p.t(kS3W) = make_conv<S>(ch[2], ch[1], 3);
  p.t(kS3B) = make_bias<S>(ch[2]);
  p.t(kS4W) = make_conv<S>(ch[3], ch[2], 3);
  p.t(kS4B) = make_bias<S>(ch[3]);
  p.t(kP1W) = make_conv<S>(cfg.proj_channels, ch[0], 1);
  p.t(kP1B) = make_bias<S>(cfg.proj_channels);
  p.t(kP2W) = make_conv<S>(cfg.proj_channels, ch[1], 1);
  p.t(kP2B) = make_bias<S>(cfg.proj_channels);
  p.t(kP3W) = make_conv<S>(cfg.proj_channels, ch[2], 1);
  p.t(kP3B) = make_bias<S>(cfg.proj_channels);
  p.t(kH1W) = make_conv<S>(cfg.head_channels, 3 * cfg.proj_channels, 1);
  p.t(kH1B) = make_bias<S>(cfg.head_channels);
  p.t(kH2W) = make_conv<S>(1, cfg.head_channels, 1);
  p.t(kH2B) = make_bias<S>(1);
  p.t(kAwW) = make_conv<S>(cfg.num_classes, ch[3], 1);
  p.t(kAwB) = make_bias<S>(cfg.num_classes);
  return p;
}

// Fan-in-scaled uniform init for kernels (limit sqrt(3/fan_in)), zero biases.
template <typename S>
ModelParams<S> init_params(const NetConfig& cfg, uint64_t seed) {
  ModelParams<S> p = zero_params<S>(cfg);
  Rng rng(seed);
  for (int id = 0; id < kNumTensors; ++id) {
    Tensor<S>& t = p.t(id);
    if (t.dims.size() == 1) continue;  // bias stays zero
    const double limit = std::sqrt(3.0 / static_cast<double>(t.value.cols()));
    for (Eigen::Index r = 0; r < t.value.rows(); ++r)
      for (Eigen::Index c = 0; c < t.value.cols(); ++c)
        t.value(r, c) = static_cast<S>(rng.next_range(-limit, limit));
  }
  return p;
}

namespace netdetail {

inline int conv_out_dim(int in, int stride) { return (in - 1) / stride + 1; }

// im2col for 3x3, pad 1; rows ordered (ic, ky, kx).
template <typename S>
void im2col3(const FeatureMap<S>& in, int stride, FeatMat<S>& col, int& oh, int& ow) {
  const int ic = in.channels(), h = in.h, w = in.w;
  oh = conv_out_dim(h, stride);
  ow = conv_out_dim(w, stride);
  col.setZero(ic * 9, static_cast<Eigen::Index>(oh) * ow);
  for (int c = 0; c < ic; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Eigen::Index row = (static_cast<Eigen::Index>(c) * 3 + ky) * 3 + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= w) continue;
            col(row, static_cast<Eigen::Index>(oy) * ow + ox) =
                in.data(c, static_cast<Eigen::Index>(iy) * w + ix);
          }
        }
      }
    }
  }
}

template <typename S>
void col2im3(const FeatMat<S>& dcol, int h, int w, int ic, int stride, FeatMat<S>& din) {
  const int oh = conv_out_dim(h, stride), ow = conv_out_dim(w, stride);
  din.setZero(ic, static_cast<Eigen::Index>(h) * w);
  for (int c = 0; c < ic; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Eigen::Index row = (static_cast<Eigen::Index>(c) * 3 + ky) * 3 + kx;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= w) continue;
            din(c, static_cast<Eigen::Index>(iy) * w + ix) +=
                dcol(row, static_cast<Eigen::Index>(oy) * ow + ox);
          }
        }
      }
    }
  }
}

struct UpsamplePlan {
  int sh = 0, sw = 0, th = 0, tw = 0;
  bool identity = false;
  std::vector<detail::ResizeTap> ty, tx;
};

inline UpsamplePlan make_upsample_plan(int sh, int sw, int th, int tw) {
  UpsamplePlan plan;
  plan.sh = sh;
  plan.sw = sw;
  plan.th = th;
  plan.tw = tw;
  plan.identity = (sh == th && sw == tw);
  if (plan.identity) return plan;
  plan.ty.resize(static_cast<size_t>(th));
  plan.tx.resize(static_cast<size_t>(tw));
  for (int y = 0; y < th; ++y) plan.ty[static_cast<size_t>(y)] = detail::resize_tap(y, sh, th);
  for (int x = 0; x < tw; ++x) plan.tx[static_cast<size_t>(x)] = detail::resize_tap(x, sw, tw);
  return plan;
}

template <typename S>
void upsample_forward(const UpsamplePlan& p, const FeatMat<S>& src, FeatMat<S>& dst) {
  if (p.identity) {
    dst = src;
    return;
  }
  dst.resize(src.rows(), static_cast<Eigen::Index>(p.th) * p.tw);
  for (int y = 0; y < p.th; ++y) {
    const auto& ry = p.ty[static_cast<size_t>(y)];
    for (int x = 0; x < p.tw; ++x) {
      const auto& rx = p.tx[static_cast<size_t>(x)];
      const S fy = static_cast<S>(ry.frac), fx = static_cast<S>(rx.frac);
      const Eigen::Index i00 = static_cast<Eigen::Index>(ry.lo) * p.sw + rx.lo;
      const Eigen::Index i01 = static_cast<Eigen::Index>(ry.lo) * p.sw + rx.hi;
      const Eigen::Index i10 = static_cast<Eigen::Index>(ry.hi) * p.sw + rx.lo;
      const Eigen::Index i11 = static_cast<Eigen::Index>(ry.hi) * p.sw + rx.hi;
      dst.col(static_cast<Eigen::Index>(y) * p.tw + x) =
          src.col(i00) * ((S(1) - fy) * (S(1) - fx)) + src.col(i01) * ((S(1) - fy) * fx) +
          src.col(i10) * (fy * (S(1) - fx)) + src.col(i11) * (fy * fx);
    }
  }
}

template <typename S>
void upsample_backward(const UpsamplePlan& p, const FeatMat<S>& ddst, FeatMat<S>& dsrc) {
  if (p.identity) {
    dsrc = ddst;
    return;
  }
  dsrc.setZero(ddst.rows(), static_cast<Eigen::Index>(p.sh) * p.sw);
  for (int y = 0; y < p.th; ++y) {
    const auto& ry = p.ty[static_cast<size_t>(y)];
    for (int x = 0; x < p.tw; ++x) {
      const auto& rx = p.tx[static_cast<size_t>(x)];
      const S fy = static_cast<S>(ry.frac), fx = static_cast<S>(rx.frac);
      const auto g = ddst.col(static_cast<Eigen::Index>(y) * p.tw + x);
      dsrc.col(static_cast<Eigen::Index>(ry.lo) * p.sw + rx.lo) += g * ((S(1) - fy) * (S(1) - fx));
      dsrc.col(static_cast<Eigen::Index>(ry.lo) * p.sw + rx.hi) += g * ((S(1) - fy) * fx);
      dsrc.col(static_cast<Eigen::Index>(ry.hi) * p.sw + rx.lo) += g * (fy * (S(1) - fx));
      dsrc.col(static_cast<Eigen::Index>(ry.hi) * p.sw + rx.hi) += g * (fy * fx);
    }
  }
}

template <typename S>
FeatMat<S> sigmoid(const FeatMat<S>& z) {
  return z.unaryExpr([](S v) { return static_cast<S>(1.0 / (1.0 + std::exp(-static_cast<double>(v)))); });
}

}  // namespace netdetail

template <typename S>
struct ForwardCtx {
  FeatureMap<S> input;
  std::array<FeatureMap<S>, 4> z, a;       // stage pre/post-ReLU
  std::array<FeatMat<S>, 4> col;           // im2col workspaces
  std::array<FeatureMap<S>, 3> proj;       // branch-1 projections (stage resolution)
  std::array<FeatMat<S>, 3> proj_up;       // upsampled to input resolution
  std::array<netdetail::UpsamplePlan, 3> proj_plan;
  FeatMat<S> cat;                          // concat of projections
  FeatMat<S> h1z, h1a;                     // branch-1 hidden conv + ReLU
  FeatMat<S> agz, b_ag;                    // branch-1 logit + sigmoid (1, h*w)
  FeatMat<S> awz;                          // branch-2 logits at stage-4 resolution
  netdetail::UpsamplePlan aw_plan;
  FeatMat<S> awup, b_aw;                   // upsampled logits + sigmoid (C, h*w)
};

template <typename S>
struct NetOutputs {
  Grid<S> b_ag;
  MultiGrid<S> b_aw;
  MultiGrid<S> b_final;
};

template <typename S>
FeatureMap<S> image_to_features(const Image8& img) {
  FeatureMap<S> f;
  f.h = img.height();
  f.w = img.width();
  f.data.resize(3, static_cast<Eigen::Index>(f.h) * f.w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < f.h; ++y)
      for (int x = 0; x < f.w; ++x)
        f.data(c, static_cast<Eigen::Index>(y) * f.w + x) =
            static_cast<S>(img.channels[static_cast<size_t>(c)](y, x)) / S(255);
  return f;
}

template <typename S>
FeatureMap<S> grids_to_features(const std::array<Grid<S>, 3>& chans) {
  FeatureMap<S> f;
  f.h = static_cast<int>(chans[0].rows());
  f.w = static_cast<int>(chans[0].cols());
  f.data.resize(3, static_cast<Eigen::Index>(f.h) * f.w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < f.h; ++y)
      for (int x = 0; x < f.w; ++x)
        f.data(c, static_cast<Eigen::Index>(y) * f.w + x) = chans[static_cast<size_t>(c)](y, x);
  return f;
}

// Two-branch forward pass. Branch 1 fuses 1x1 projections of stages 1-3 at
// input resolution into a single class-agnostic map; branch 2 maps stage-4
// features to C channels; the final map is their pixel-wise product.
template <typename S>
NetOutputs<S> forward(const ModelParams<S>& params, const FeatureMap<S>& input,
                      ForwardCtx<S>* ctx_out = nullptr) {
  using namespace netdetail;
  if (input.channels() != 3) throw InvalidInputError("forward: input must have 3 channels");
  if (input.h < 8 || input.w < 8) throw InvalidInputError("forward: input too small");
  ForwardCtx<S> local;
  ForwardCtx<S>& ctx = ctx_out ? *ctx_out : local;
  ctx.input = input;

  const NetConfig& cfg = params.cfg;
  const FeatureMap<S>* prev = &ctx.input;
  for (int i = 0; i < 4; ++i) {
    int oh = 0, ow = 0;
    im2col3(*prev, cfg.stage_strides[static_cast<size_t>(i)], ctx.col[static_cast<size_t>(i)], oh, ow);
    FeatureMap<S>& z = ctx.z[static_cast<size_t>(i)];
    z.h = oh;
    z.w = ow;
    z.data.noalias() = params.t(2 * i).value * ctx.col[static_cast<size_t>(i)];
    z.data.colwise() += params.t(2 * i + 1).value.col(0);
    FeatureMap<S>& a = ctx.a[static_cast<size_t>(i)];
    a.h = oh;
    a.w = ow;
    a.data = z.data.cwiseMax(S(0));
    prev = &a;
  }

  const int H = input.h, W = input.w;
  const Eigen::Index hw = static_cast<Eigen::Index>(H) * W;

  // Branch 1: class-agnostic.
  for (int i = 0; i < 3; ++i) {
    const FeatureMap<S>& a = ctx.a[static_cast<size_t>(i)];
    FeatureMap<S>& pr = ctx.proj[static_cast<size_t>(i)];
    pr.h = a.h;
    pr.w = a.w;
    pr.data.noalias() = params.t(kP1W + 2 * i).value * a.data;
    pr.data.colwise() += params.t(kP1B + 2 * i).value.col(0);
    ctx.proj_plan[static_cast<size_t>(i)] = make_upsample_plan(a.h, a.w, H, W);
    upsample_forward(ctx.proj_plan[static_cast<size_t>(i)], pr.data, ctx.proj_up[static_cast<size_t>(i)]);
  }
  const int pc = cfg.proj_channels;
  ctx.cat.resize(3 * pc, hw);
  for (int i = 0; i < 3; ++i) ctx.cat.middleRows(i * pc, pc) = ctx.proj_up[static_cast<size_t>(i)];
  ctx.h1z.noalias() = params.t(kH1W).value * ctx.cat;
  ctx.h1z.colwise() += params.t(kH1B).value.col(0);
  ctx.h1a = ctx.h1z.cwiseMax(S(0));
  ctx.agz.noalias() = params.t(kH2W).value * ctx.h1a;
  ctx.agz.colwise() += params.t(kH2B).value.col(0);
  ctx.b_ag = sigmoid(ctx.agz);

  // Branch 2: class-aware.
  const FeatureMap<S>& a4 = ctx.a[3];
  ctx.awz.noalias() = params.t(kAwW).value * a4.data;
  ctx.awz.colwise() += params.t(kAwB).value.col(0);
  ctx.aw_plan = make_upsample_plan(a4.h, a4.w, H, W);
  upsample_forward(ctx.aw_plan, ctx.awz, ctx.awup);
  ctx.b_aw = sigmoid(ctx.awup);

  NetOutputs<S> out;
  out.b_ag = Eigen::Map<const Grid<S>>(ctx.b_ag.data(), H, W);
  out.b_aw = MultiGrid<S>(cfg.num_classes, H, W);
  out.b_final = MultiGrid<S>(cfg.num_classes, H, W);
  for (int c = 0; c < cfg.num_classes; ++c) {
    out.b_aw[c] = Eigen::Map<const Grid<S>>(ctx.b_aw.row(c).data(), H, W);
    out.b_final[c] = out.b_aw[c].cwiseProduct(out.b_ag);
  }
  return out;
}

template <typename S>
using ParamGrads = std::array<FeatMat<S>, kNumTensors>;

// Reverse-mode gradients of the branch outputs with respect to all tensors,
// seeded by dL/dB_ag and dL/dB_aw.
template <typename S>
ParamGrads<S> backward(const ModelParams<S>& params, const ForwardCtx<S>& ctx,
                       const Grid<S>& d_b_ag, const MultiGrid<S>& d_b_aw) {
  using namespace netdetail;
  const NetConfig& cfg = params.cfg;
  ParamGrads<S> g;
  for (int id = 0; id < kNumTensors; ++id)
    g[static_cast<size_t>(id)] =
        FeatMat<S>::Zero(params.t(id).value.rows(), params.t(id).value.cols());

  const int H = ctx.input.h, W = ctx.input.w;
  const Eigen::Index hw = static_cast<Eigen::Index>(H) * W;

  // Stage activation grads accumulate from both branches.
  std::array<FeatMat<S>, 4> da;
  for (int i = 0; i < 4; ++i)
    da[static_cast<size_t>(i)] = FeatMat<S>::Zero(ctx.a[static_cast<size_t>(i)].data.rows(),
                                                  ctx.a[static_cast<size_t>(i)].data.cols());

  // Branch 2 backward.
  {
    FeatMat<S> d_baw(cfg.num_classes, hw);
    for (int c = 0; c < cfg.num_classes; ++c)
      d_baw.row(c) = Eigen::Map<const Eigen::Matrix<S, 1, Eigen::Dynamic, Eigen::RowMajor>>(
          d_b_aw[c].data(), hw);
    const FeatMat<S> dz = d_baw.cwiseProduct(ctx.b_aw)
                              .cwiseProduct((FeatMat<S>::Ones(ctx.b_aw.rows(), ctx.b_aw.cols()) - ctx.b_aw));
    FeatMat<S> d_awz;
    upsample_backward(ctx.aw_plan, dz, d_awz);
    g[kAwW].noalias() += d_awz * ctx.a[3].data.transpose();
    g[kAwB].col(0) += d_awz.rowwise().sum();
    da[3].noalias() += params.t(kAwW).value.transpose() * d_awz;
  }

  // Branch 1 backward.
  {
    const FeatMat<S> d_bag =
        Eigen::Map<const FeatMat<S>>(d_b_ag.data(), 1, hw);
    const FeatMat<S> dz_ag =
        d_bag.cwiseProduct(ctx.b_ag).cwiseProduct((FeatMat<S>::Ones(1, hw) - ctx.b_ag));
    g[kH2W].noalias() += dz_ag * ctx.h1a.transpose();
    g[kH2B].col(0) += dz_ag.rowwise().sum();
    FeatMat<S> dh1a = params.t(kH2W).value.transpose() * dz_ag;
    const FeatMat<S> dh1z =
        dh1a.cwiseProduct((ctx.h1z.array() > S(0)).template cast<S>().matrix());
    g[kH1W].noalias() += dh1z * ctx.cat.transpose();
    g[kH1B].col(0) += dh1z.rowwise().sum();
    const FeatMat<S> dcat = params.t(kH1W).value.transpose() * dh1z;
    const int pc = cfg.proj_channels;
    for (int i = 0; i < 3; ++i) {
      FeatMat<S> dproj;
      upsample_backward(ctx.proj_plan[static_cast<size_t>(i)],
                        FeatMat<S>(dcat.middleRows(i * pc, pc)), dproj);
      g[kP1W + 2 * i].noalias() += dproj * ctx.a[static_cast<size_t>(i)].data.transpose();
      g[kP1B + 2 * i].col(0) += dproj.rowwise().sum();
      da[static_cast<size_t>(i)].noalias() += params.t(kP1W + 2 * i).value.transpose() * dproj;
    }
  }

  // Backbone backward, stage 4 down to 1.
  FeatMat<S> carry;  // gradient w.r.t. the previous stage's activation
  for (int i = 3; i >= 0; --i) {
    if (i < 3) da[static_cast<size_t>(i)] += carry;
    const FeatMat<S> dz = da[static_cast<size_t>(i)].cwiseProduct(
        (ctx.z[static_cast<size_t>(i)].data.array() > S(0)).template cast<S>().matrix());
    g[2 * i].noalias() += dz * ctx.col[static_cast<size_t>(i)].transpose();
    g[2 * i + 1].col(0) += dz.rowwise().sum();
    if (i > 0) {
      const FeatMat<S> dcol = params.t(2 * i).value.transpose() * dz;
      const FeatureMap<S>& prev = ctx.a[static_cast<size_t>(i - 1)];
      col2im3(dcol, prev.h, prev.w, prev.channels(), cfg.stage_strides[static_cast<size_t>(i)],
              carry);
    }
  }
  return g;
}

inline double poly_lr(int step, int total_steps, double base_lr, double power) {
  if (total_steps <= 0) throw InvalidInputError("poly_lr: total_steps must be > 0");
  if (step < 0 || step > total_steps) throw InvalidInputError("poly_lr: step out of range");
  return base_lr * std::pow(1.0 - static_cast<double>(step) / total_steps, power);
}

struct OptimConfig {
  double base_lr = 1e-2;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double poly_power = 0.9;
  int total_steps = 2000;
};

template <typename S>
struct OptimState {
  OptimConfig cfg;
  std::array<FeatMat<S>, kNumTensors> velocity;
  int step = 0;
};

template <typename S>
OptimState<S> make_optim(const ModelParams<S>& params, const OptimConfig& cfg) {
  OptimState<S> o;
  o.cfg = cfg;
  for (int id = 0; id < kNumTensors; ++id)
    o.velocity[static_cast<size_t>(id)] =
        FeatMat<S>::Zero(params.t(id).value.rows(), params.t(id).value.cols());
  return o;
}

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SGD with momentum, weight decay and polynomial LR decay. Tensors that saw
// no gradient this step and have no velocity are left untouched, so unused
// branches stay at their initialization.
template <typename S>
void sgd_update(ModelParams<S>& params, OptimState<S>& opt, const ParamGrads<S>& grads) {
  const double lr = poly_lr(opt.step, opt.cfg.total_steps, opt.cfg.base_lr, opt.cfg.poly_power);
  for (int id = 0; id < kNumTensors; ++id) {
    const auto& grad = grads[static_cast<size_t>(id)];
    auto& vel = opt.velocity[static_cast<size_t>(id)];
    auto& w = params.t(id).value;
    if (grad.isZero(S(0)) && vel.isZero(S(0))) continue;
    vel = vel * static_cast<S>(opt.cfg.momentum) + grad +
          w * static_cast<S>(opt.cfg.weight_decay);
    w -= vel * static_cast<S>(lr);
  }
  ++opt.step;
}

// One training step on a single sample's precomputed segment sets; returns
// the loss before the update.
template <typename S>
LossBreakdown<S> train_step(ModelParams<S>& params, OptimState<S>& opt,
                            const FeatureMap<S>& input, const SegmentSets& sets, double lambda,
                            double eps = kProbClamp) {
  ForwardCtx<S> ctx;
  NetOutputs<S> out = forward(params, input, &ctx);
  LossBreakdown<S> lb = total_loss(out.b_ag, out.b_aw, sets, lambda, eps);
  if (!std::isfinite(lb.total))
    throw TrainingError("train_step: non-finite loss at step " + std::to_string(opt.step) +
                        " (l_ag=" + std::to_string(lb.loss_ag) +
                        ", l_aw=" + std::to_string(lb.loss_aw) + ")");
  ParamGrads<S> grads = backward(params, ctx, lb.grad_ag, lb.grad_aw);
  sgd_update(params, opt, grads);
  return lb;
}

namespace netdetail {

inline constexpr char kCheckpointMagic[4] = {'W', 'S', 'B', 'D'};
inline constexpr uint32_t kCheckpointVersion = 1;

struct RawTensor {
  std::vector<uint32_t> dims;
  std::vector<float> data;
};

void write_record(std::ostream& out, const std::string& name, const std::vector<uint32_t>& dims,
                  const float* data, size_t count);
// All records in file order; throws DecodeError on malformed input.
std::vector<std::pair<std::string, RawTensor>> read_checkpoint_records(
    const std::filesystem::path& path);

}  // namespace netdetail

// Checkpoint IO. Tensors are serialized in fixed order as
// (name_len, name, ndim, dims[], float32 payload); optimizer state follows
// under "<name>.momentum" plus a scalar "optim.step".
template <typename S>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<S>& params,
                     const OptimState<S>* opt = nullptr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out.write(netdetail::kCheckpointMagic, 4);
  const uint32_t version = netdetail::kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  std::vector<float> buf;
  auto write_tensor = [&](const std::string& name, const std::vector<uint32_t>& dims,
                          const FeatMat<S>& m) {
    buf.resize(static_cast<size_t>(m.size()));
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) buf[static_cast<size_t>(k++)] = static_cast<float>(m(r, c));
    netdetail::write_record(out, name, dims, buf.data(), buf.size());
  };
  for (int id = 0; id < kNumTensors; ++id)
    write_tensor(tensor_name(id), params.t(id).dims, params.t(id).value);
  if (opt) {
    for (int id = 0; id < kNumTensors; ++id)
      write_tensor(std::string(tensor_name(id)) + ".momentum", params.t(id).dims,
                   opt->velocity[static_cast<size_t>(id)]);
    const float step = static_cast<float>(opt->step);
    netdetail::write_record(out, "optim.step", {1}, &step, 1);
  }
  if (!out) throw std::runtime_error("short write: " + path.string());
}

template <typename S>
void load_checkpoint(const std::filesystem::path& path, ModelParams<S>& params,
                     OptimState<S>* opt = nullptr) {
  const auto records = netdetail::read_checkpoint_records(path);
  auto find = [&](const std::string& name) -> const netdetail::RawTensor* {
    for (const auto& [n, t] : records)
      if (n == name) return &t;
    return nullptr;
  };
  auto load_into = [&](const std::string& name, const std::vector<uint32_t>& want_dims,
                       FeatMat<S>& m) {
    const netdetail::RawTensor* raw = find(name);
    if (!raw) throw DecodeError("checkpoint missing tensor '" + name + "'");
    if (raw->dims != want_dims) throw DecodeError("shape mismatch for tensor '" + name + "'");
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<S>(raw->data[static_cast<size_t>(k++)]);
  };
  for (int id = 0; id < kNumTensors; ++id)
    load_into(tensor_name(id), params.t(id).dims, params.t(id).value);
  if (opt) {
    for (int id = 0; id < kNumTensors; ++id)
      load_into(std::string(tensor_name(id)) + ".momentum", params.t(id).dims,
                opt->velocity[static_cast<size_t>(id)]);
    const netdetail::RawTensor* step = find("optim.step");
    if (!step) throw DecodeError("checkpoint missing tensor 'optim.step'");
    opt->step = static_cast<int>(step->data.at(0));
  }
}

}  // namespace milb
