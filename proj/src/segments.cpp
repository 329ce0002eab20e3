#include "milboundary/segments.hpp"

#include <algorithm>
#include <cmath>

namespace milb {

namespace {

bool lex_less(PixelCoord a, PixelCoord b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

// Forward Bresenham from a to b (a lexicographically <= b), inclusive.
int rasterize_forward(PixelCoord a, PixelCoord b, PixelCoord* buf) {
  const int dx = b.x - a.x, dy = b.y - a.y;
  const int adx = std::abs(dx), ady = std::abs(dy);
  const int n = std::max(adx, ady);
  if (n == 0) {
    buf[0] = a;
    return 1;
  }
  const bool x_primary = adx >= ady;
  const int sp = x_primary ? (dx >= 0 ? 1 : -1) : (dy >= 0 ? 1 : -1);
  const int ss = x_primary ? (dy >= 0 ? 1 : -1) : (dx >= 0 ? 1 : -1);
  const int asec = x_primary ? ady : adx;
  for (int i = 0; i <= n; ++i) {
    // displacement rounded to nearest, ties away from zero
    const int d = (2 * i * asec + n) / (2 * n);
    const int p = i * sp, s = d * ss;
    buf[i] = x_primary ? PixelCoord{static_cast<int16_t>(a.x + p), static_cast<int16_t>(a.y + s)}
                       : PixelCoord{static_cast<int16_t>(a.x + s), static_cast<int16_t>(a.y + p)};
  }
  return n + 1;
}

}  // namespace

int rasterize_line_into(PixelCoord a, PixelCoord b, PixelCoord* buf, int cap) {
  const int n = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y)) + 1;
  if (n > cap) throw InvalidInputError("rasterize_line_into: buffer too small");
  if (lex_less(b, a)) {
    const int cnt = rasterize_forward(b, a, buf);
    std::reverse(buf, buf + cnt);
    return cnt;
  }
  return rasterize_forward(a, b, buf);
}

std::vector<PixelCoord> rasterize_line(PixelCoord a, PixelCoord b) {
  const int n = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y)) + 1;
  std::vector<PixelCoord> out(static_cast<size_t>(n));
  rasterize_line_into(a, b, out.data(), n);
  return out;
}

std::vector<PixelCoord> half_disc_offsets(double gamma) {
  const double g2 = gamma * gamma;
  const int r = static_cast<int>(std::ceil(gamma));
  std::vector<PixelCoord> offsets;
  for (int dy = 0; dy <= r; ++dy) {
    for (int dx = dy == 0 ? 1 : -r; dx <= r; ++dx) {
      const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
      if (d2 < g2) offsets.push_back({static_cast<int16_t>(dx), static_cast<int16_t>(dy)});
    }
  }
  return offsets;
}

SegmentSets enumerate_valid_segments(const ConfidentLabelMap& labels, double gamma,
                                     const SegmentSubsample& sub) {
  GammaParam{gamma}.validate();
  const int h = labels.height(), w = labels.width();
  const std::vector<PixelCoord> offsets = half_disc_offsets(gamma);

  SegmentSets sets;
  sets.num_classes = labels.num_classes;
  sets.gamma = gamma;
  sets.positive_per_class.resize(static_cast<size_t>(labels.num_classes));

  std::vector<uint32_t> pick;  // offset indices chosen for the current anchor
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (labels.is_ignore(y, x)) continue;
      const PixelCoord a{static_cast<int16_t>(x), static_cast<int16_t>(y)};
      const bool capped =
          sub.max_pairs_per_pixel > 0 && offsets.size() > sub.max_pairs_per_pixel;
      if (capped) {
        // Deterministic partial Fisher-Yates draw of offset indices.
        pick.resize(offsets.size());
        for (uint32_t i = 0; i < offsets.size(); ++i) pick[i] = i;
        Rng rng = Rng::for_index(sub.seed, static_cast<uint64_t>(y) * static_cast<uint64_t>(w) + x);
        for (uint32_t i = 0; i < sub.max_pairs_per_pixel; ++i) {
          const auto j = static_cast<uint32_t>(
              rng.next_int(i, static_cast<int64_t>(offsets.size()) - 1));
          std::swap(pick[i], pick[j]);
        }
        std::sort(pick.begin(), pick.begin() + sub.max_pairs_per_pixel);
      }
      const size_t n_off = capped ? sub.max_pairs_per_pixel : offsets.size();
      for (size_t k = 0; k < n_off; ++k) {
        const PixelCoord off = offsets[capped ? pick[k] : k];
        const int nx = x + off.x, ny = y + off.y;
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        if (labels.is_ignore(ny, nx)) continue;
        sets.all.push_back(
            {a, PixelCoord{static_cast<int16_t>(nx), static_cast<int16_t>(ny)}, 0});
      }
    }
  }
  return sets;
}

uint32_t segment_label_mask(uint8_t state_a, uint8_t state_b) {
  if (state_a == ConfidentLabelMap::kIgnore || state_b == ConfidentLabelMap::kIgnore)
    throw std::logic_error("segment_label_mask: ignore endpoint must be filtered by enumeration");
  if (state_a == state_b) return 0;
  uint32_t mask = 0;
  if (state_a != ConfidentLabelMap::kBackground) mask |= 1u << (state_a - 1);
  if (state_b != ConfidentLabelMap::kBackground) mask |= 1u << (state_b - 1);
  return mask;
}

void label_segments(SegmentSets& segs, const ConfidentLabelMap& labels) {
  segs.num_classes = labels.num_classes;
  segs.positive_per_class.assign(static_cast<size_t>(labels.num_classes), {});
  segs.positive_union.clear();
  for (uint32_t i = 0; i < segs.all.size(); ++i) {
    SegmentRecord& r = segs.all[i];
    r.label_mask =
        segment_label_mask(labels.states(r.a.y, r.a.x), labels.states(r.b.y, r.b.x));
    if (r.label_mask != 0) {
      segs.positive_union.push_back(i);
      for (int c = 0; c < labels.num_classes; ++c)
        if ((r.label_mask >> c) & 1u) segs.positive_per_class[static_cast<size_t>(c)].push_back(i);
    }
  }
}

}  // namespace milb
