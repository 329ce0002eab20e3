#include "milboundary/synthgen.hpp"

#include <algorithm>
#include <deque>

namespace milb {

namespace {

struct Rgb {
  double r, g, b;
};

// h in [0,1), s,v in [0,1]
Rgb hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double hh = h * 6.0;
  const int i = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

struct Shape {
  ShapeKind kind;
  int class_id;
  double cx, cy;
  double r0, r1;       // primary/secondary radius
  double angle;        // rotation (triangle)
  Rgb color;
};

bool shape_contains(const Shape& s, double x, double y) {
  const double dx = x - s.cx, dy = y - s.cy;
  switch (s.kind) {
    case ShapeKind::Disc:
      return dx * dx + dy * dy <= s.r0 * s.r0;
    case ShapeKind::Rectangle:
      return std::abs(dx) <= s.r0 && std::abs(dy) <= s.r1;
    case ShapeKind::Ring: {
      const double d2 = dx * dx + dy * dy;
      return d2 <= s.r0 * s.r0 && d2 >= s.r1 * s.r1;
    }
    case ShapeKind::Triangle: {
      // Equilateral triangle of circumradius r0, rotated by angle.
      double vx[3], vy[3];
      for (int k = 0; k < 3; ++k) {
        const double a = s.angle + 2.0 * M_PI * k / 3.0;
        vx[k] = s.cx + s.r0 * std::cos(a);
        vy[k] = s.cy + s.r0 * std::sin(a);
      }
      double sign = 0;
      for (int k = 0; k < 3; ++k) {
        const int j = (k + 1) % 3;
        const double cross = (vx[j] - vx[k]) * (y - vy[k]) - (vy[j] - vy[k]) * (x - vx[k]);
        if (cross == 0) continue;
        if (sign == 0)
          sign = cross > 0 ? 1 : -1;
        else if ((cross > 0 ? 1 : -1) != sign)
          return false;
      }
      return true;
    }
  }
  return false;
}

uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

}  // namespace

GridU8 erode_disc(const GridU8& region, double radius) {
  if (radius <= 0.0) return region;
  const int h = static_cast<int>(region.rows()), w = static_cast<int>(region.cols());
  const int ri = static_cast<int>(std::floor(radius));
  std::vector<PixelCoord> se;
  for (int dy = -ri; dy <= ri; ++dy)
    for (int dx = -ri; dx <= ri; ++dx)
      if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= radius * radius)
        se.push_back({static_cast<int16_t>(dx), static_cast<int16_t>(dy)});
  GridU8 out = GridU8::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region(y, x)) continue;
      bool keep = true;
      for (const auto& o : se) {
        const int ny = y + o.y, nx = x + o.x;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w || !region(ny, nx)) {
          keep = false;
          break;
        }
      }
      out(y, x) = keep ? 1 : 0;
    }
  }
  return out;
}

namespace {

// Keeps a random connected sub-region with at least `fraction` of the support
// area, grown by BFS from a random support pixel (all draws from rng).
GridU8 keep_partial_region(const GridU8& support, double fraction, Rng& rng) {
  const int h = static_cast<int>(support.rows()), w = static_cast<int>(support.cols());
  std::vector<int> support_idx;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (support(y, x)) support_idx.push_back(y * w + x);
  if (support_idx.empty()) return support;
  const auto target =
      static_cast<size_t>(std::ceil(fraction * static_cast<double>(support_idx.size())));
  GridU8 kept = GridU8::Zero(h, w);
  GridU8 seen = GridU8::Zero(h, w);
  size_t kept_count = 0;
  size_t cursor = static_cast<size_t>(rng.next_int(0, static_cast<int64_t>(support_idx.size()) - 1));
  std::deque<int> queue;
  auto push = [&](int y, int x) {
    if (y < 0 || y >= h || x < 0 || x >= w) return;
    if (!support(y, x) || seen(y, x)) return;
    seen(y, x) = 1;
    queue.push_back(y * w + x);
  };
  push(support_idx[cursor] / w, support_idx[cursor] % w);
  while (kept_count < target) {
    if (queue.empty()) {
      // Component exhausted: continue from the next unvisited support pixel.
      while (cursor < support_idx.size() &&
             seen(support_idx[cursor] / w, support_idx[cursor] % w))
        ++cursor;
      if (cursor >= support_idx.size()) break;
      push(support_idx[cursor] / w, support_idx[cursor] % w);
      continue;
    }
    const int idx = queue.front();
    queue.pop_front();
    const int y = idx / w, x = idx % w;
    kept(y, x) = 1;
    ++kept_count;
    push(y - 1, x);
    push(y + 1, x);
    push(y, x - 1);
    push(y, x + 1);
  }
  return kept;
}

}  // namespace

MultiGridF simulate_cam(const SegMask& gt_mask, const CamDegradation& deg, Rng& rng) {
  deg.validate();
  const int h = gt_mask.height(), w = gt_mask.width();
  MultiGridF cams(gt_mask.num_classes, h, w);
  for (int c = 0; c < gt_mask.num_classes; ++c) {
    GridU8 region = (gt_mask.labels.array() == static_cast<uint8_t>(c)).cast<uint8_t>();
    if (region.maxCoeff() == 0) continue;  // empty class: all-zero channel
    region = erode_disc(region, deg.erosion_radius);
    if (deg.part_bias > 0.0) region = keep_partial_region(region, deg.part_bias, rng);
    GridF score = region.cast<float>();
    score = gaussian_blur(score, deg.blur_sigma);
    if (deg.noise_amplitude > 0.0) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          score(y, x) += static_cast<float>(
              rng.next_range(-deg.noise_amplitude, deg.noise_amplitude));
    }
    cams[c] = normalize_cam(score);
  }
  return cams;
}

double cam_quality(const MultiGridF& cams, const SegMask& gt_mask, double fg_threshold) {
  if (fg_threshold <= 0.0 || fg_threshold >= 1.0)
    throw InvalidInputError("cam_quality: fg_threshold must be in (0,1)");
  const int h = gt_mask.height(), w = gt_mask.width();
  double iou_sum = 0.0;
  int present = 0;
  for (int c = 0; c < gt_mask.num_classes; ++c) {
    int64_t inter = 0, uni = 0;
    bool any_gt = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool in_gt = gt_mask.labels(y, x) == static_cast<uint8_t>(c);
        const bool in_cam = cams[c](y, x) >= static_cast<float>(fg_threshold);
        any_gt |= in_gt;
        inter += (in_gt && in_cam) ? 1 : 0;
        uni += (in_gt || in_cam) ? 1 : 0;
      }
    }
    if (!any_gt) continue;
    ++present;
    iou_sum += uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
  }
  return present > 0 ? iou_sum / present : 0.0;
}

Sample generate_scene(const SceneConfig& cfg, const CamDegradation& deg, int index) {
  cfg.validate();
  deg.validate();
  if (index < 0) throw InvalidInputError("generate_scene: index must be >= 0");
  Rng rng = Rng::for_index(cfg.seed, static_cast<uint64_t>(index));
  const int sz = cfg.image_size;

  Sample s;
  s.gt_mask.num_classes = cfg.num_classes;
  s.gt_mask.labels = GridU8::Constant(sz, sz, kBackgroundLabel);
  s.image = Image8(sz, sz);

  // Background: muted low-frequency shading.
  const double bg_phase_x = rng.next_range(0.0, 2.0 * M_PI);
  const double bg_phase_y = rng.next_range(0.0, 2.0 * M_PI);
  const double bg_freq = rng.next_range(1.0, 2.5);

  const int n_shapes = static_cast<int>(rng.next_int(cfg.min_shapes, cfg.max_shapes));
  std::vector<Shape> shapes;
  shapes.reserve(static_cast<size_t>(n_shapes));
  for (int i = 0; i < n_shapes; ++i) {
    Shape sh;
    sh.class_id = static_cast<int>(rng.next_int(0, cfg.num_classes - 1));
    sh.kind = cfg.kind_for(sh.class_id);
    const double margin = 0.18 * sz;
    sh.cx = rng.next_range(margin, sz - margin);
    sh.cy = rng.next_range(margin, sz - margin);
    sh.r0 = rng.next_range(0.14 * sz, 0.23 * sz);
    sh.r1 = sh.kind == ShapeKind::Ring ? sh.r0 * rng.next_range(0.45, 0.65)
                                       : rng.next_range(0.11 * sz, 0.20 * sz);
    sh.angle = rng.next_range(0.0, 2.0 * M_PI);
    // Class hue bands keep classes visually separable.
    const double hue = (sh.class_id + 0.5 * rng.next_double()) / cfg.num_classes;
    sh.color = hsv_to_rgb(hue, rng.next_range(0.55, 0.8), rng.next_range(0.55, 0.85));
    shapes.push_back(sh);
  }

  for (int y = 0; y < sz; ++y) {
    for (int x = 0; x < sz; ++x) {
      const double u = static_cast<double>(x) / sz, v = static_cast<double>(y) / sz;
      double shade = 0.40 + 0.06 * std::sin(bg_freq * 2 * M_PI * u + bg_phase_x) +
                     0.06 * std::sin(bg_freq * 2 * M_PI * v + bg_phase_y);
      Rgb px{shade, shade * 0.96, shade * 0.92};
      // Later shapes occlude earlier ones.
      for (const auto& sh : shapes) {
        if (shape_contains(sh, x + 0.5, y + 0.5)) {
          px = sh.color;
          s.gt_mask.labels(y, x) = static_cast<uint8_t>(sh.class_id);
        }
      }
      for (int k = 0; k < 3; ++k) {
        double val = (k == 0 ? px.r : k == 1 ? px.g : px.b);
        if (cfg.noise_amplitude > 0)
          val += rng.next_range(-cfg.noise_amplitude, cfg.noise_amplitude);
        s.image.channels[static_cast<size_t>(k)](y, x) = quantize(val);
      }
    }
  }

  std::set<int> present;
  for (int y = 0; y < sz; ++y)
    for (int x = 0; x < sz; ++x)
      if (s.gt_mask.labels(y, x) != kBackgroundLabel) present.insert(s.gt_mask.labels(y, x));
  s.image_labels.assign(present.begin(), present.end());

  s.gt_boundaries = extract_boundaries(s.gt_mask);
  s.cams = simulate_cam(s.gt_mask, deg, rng);
  return s;
}

}  // namespace milb
