#include "milboundary/pseudolabel.hpp"

#include <algorithm>
#include <cmath>

namespace milb {

namespace {

// Bilinear sample with zero outside the grid.
double sample_bilinear(const GridF& m, double x, double y) {
  const int h = static_cast<int>(m.rows()), w = static_cast<int>(m.cols());
  if (x < -1.0 || y < -1.0 || x > w || y > h) return 0.0;
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto at = [&](int yy, int xx) -> double {
    if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
    return static_cast<double>(m(yy, xx));
  };
  const double top = at(y0, x0) * (1 - fx) + at(y0, x0 + 1) * fx;
  const double bot = at(y0 + 1, x0) * (1 - fx) + at(y0 + 1, x0 + 1) * fx;
  return top * (1 - fy) + bot * fy;
}

}  // namespace

namespace {

GridF nms_pass(const GridF& score, const NmsConfig& cfg) {
  const int h = static_cast<int>(score.rows()), w = static_cast<int>(score.cols());
  const GridF smooth = gaussian_blur(score, cfg.smooth_sigma);
  auto sm = [&](int y, int x) -> double {
    return smooth(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  // Boundary normal from the structure tensor of the Sobel gradients of the
  // smoothed map: the dominant gradient-energy direction points across a
  // ridge even at its crest, where the raw gradient vanishes.
  GridF gx(h, w), gy(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gx(y, x) = static_cast<float>((sm(y - 1, x + 1) + 2 * sm(y, x + 1) + sm(y + 1, x + 1)) -
                                    (sm(y - 1, x - 1) + 2 * sm(y, x - 1) + sm(y + 1, x - 1)));
      gy(y, x) = static_cast<float>((sm(y + 1, x - 1) + 2 * sm(y + 1, x) + sm(y + 1, x + 1)) -
                                    (sm(y - 1, x - 1) + 2 * sm(y - 1, x) + sm(y - 1, x + 1)));
    }
  }
  const GridF jxx = gaussian_blur(GridF(gx.cwiseProduct(gx)), cfg.smooth_sigma);
  const GridF jxy = gaussian_blur(GridF(gx.cwiseProduct(gy)), cfg.smooth_sigma);
  const GridF jyy = gaussian_blur(GridF(gy.cwiseProduct(gy)), cfg.smooth_sigma);

  GridF out = GridF::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float s = score(y, x);
      if (s <= 0.0f) continue;  // zero pixels stay zero either way
      // A pixel with at most 4 positive 8-neighbors already sits on a thin
      // structure (curve interior, corner, junction, endpoint); keeping it
      // outright makes thin maps fixed points of the pass. Wide ridges have
      // 5+ positive neighbors, so suppression there is unaffected.
      int positive_neighbors = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int ny = y + dy, nx = x + dx;
          if (ny >= 0 && ny < h && nx >= 0 && nx < w && score(ny, nx) > 0.0f)
            ++positive_neighbors;
        }
      if (positive_neighbors <= 4) {
        out(y, x) = s;
        continue;
      }
      const double a = jxx(y, x), b = jxy(y, x), c = jyy(y, x);
      const double tr = a + c;
      const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
      const double l1 = 0.5 * (tr + disc);  // dominant gradient energy
      bool survives = true;
      // No credible normal (flat or isotropic neighborhood): keep the pixel.
      if (l1 > 1e-12 && disc > 1e-12 * std::max(1.0, tr)) {
        // Eigenvector for l1 of [[a, b], [b, c]].
        double nx, ny;
        if (std::abs(b) > 1e-20) {
          nx = l1 - c;
          ny = b;
        } else if (a >= c) {
          nx = 1.0;
          ny = 0.0;
        } else {
          nx = 0.0;
          ny = 1.0;
        }
        const double norm = std::hypot(nx, ny);
        nx /= norm;
        ny /= norm;
        // A pixel with no cross-normal mass right next to it is already a
        // crest; keeping it outright makes thinning stable on thin inputs.
        const bool already_thin =
            sample_bilinear(score, x + nx, y + ny) <= 0.5 * static_cast<double>(s) &&
            sample_bilinear(score, x - nx, y - ny) <= 0.5 * static_cast<double>(s);
        if (!already_thin) {
          const double limit = cfg.multiplier * static_cast<double>(s);
          for (int k = 1; k <= cfg.radius && survives; ++k) {
            if (limit < sample_bilinear(score, x + k * nx, y + k * ny) ||
                limit < sample_bilinear(score, x - k * nx, y - k * ny))
              survives = false;
          }
        }
      }
      if (survives) out(y, x) = s;
    }
  }
  return out;
}

}  // namespace

GridF nms_thin(const GridF& score, const NmsConfig& cfg) {
  cfg.validate();
  // The suppression pass is iterated to a fixed point: thinning changes the
  // orientation field near ridge junctions, so a single pass is not a fixed
  // point of itself. Support shrinks monotonically, so this terminates.
  GridF current = nms_pass(score, cfg);
  for (;;) {
    GridF next = nms_pass(current, cfg);
    if (next == current) return current;
    current = std::move(next);
  }
}

OtsuResult otsu_threshold(const std::vector<float>& scores) {
  if (scores.empty()) throw InvalidInputError("otsu_threshold: empty input");
  float lo = scores[0], hi = scores[0];
  for (float v : scores) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return {static_cast<double>(lo), true};

  const double width = (static_cast<double>(hi) - lo) / 256.0;
  const auto n = static_cast<double>(scores.size());
  double best_var = -1.0;
  int best_k = 0;
  for (int k = 0; k < 256; ++k) {
    const double t = static_cast<double>(lo) + k * width;
    double n0 = 0, sum0 = 0, sum1 = 0;
    for (float v : scores) {
      if (static_cast<double>(v) < t) {
        n0 += 1;
        sum0 += v;
      } else {
        sum1 += v;
      }
    }
    const double n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double mu0 = sum0 / n0, mu1 = sum1 / n1;
    const double var = (n0 / n) * (n1 / n) * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_k = k;
    }
  }
  return {static_cast<double>(lo) + best_k * width, false};
}

PseudoLabels make_pseudo_labels(const ModelParams<float>& params, const Image8& image,
                                const std::vector<int>& image_labels, const MsfConfig& msf,
                                const NmsConfig& nms, bool apply_nms) {
  Prediction<float> pred = msf_predict(params, image, msf);
  const int H = image.height(), W = image.width();
  const int C = params.cfg.num_classes;

  PseudoLabels out;
  out.soft = filter_irrelevant_classes(pred.b_final, image_labels);
  out.hard = BoundaryLabelMap(H, W, C);

  MultiGridF thinned(C, H, W);
  std::vector<float> pool;
  for (int c : image_labels) {
    thinned[c] = apply_nms ? nms_thin(out.soft[c], nms) : out.soft[c];
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        if (thinned[c](y, x) > 0.0f) pool.push_back(thinned[c](y, x));
  }
  if (pool.empty()) {
    out.degenerate_otsu = true;
    out.threshold = 0.0;
    return out;
  }
  const OtsuResult otsu = otsu_threshold(pool);
  out.threshold = otsu.threshold;
  out.degenerate_otsu = otsu.degenerate;
  for (int c : image_labels)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        if (thinned[c](y, x) > 0.0f && static_cast<double>(thinned[c](y, x)) >= out.threshold)
          out.hard.set(y, x, c);
  return out;
}

}  // namespace milb
