#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "milboundary/grid.hpp"
#include "milboundary/rng.hpp"
#include "milboundary/seeds.hpp"

namespace milb {

// A valid line segment: endpoints, rasterized pixels, and its semantic
// boundary label set (bit c set = crosses a class-c boundary, |labels| <= 2).
struct LineSegment {
  PixelCoord a, b;
  std::vector<PixelCoord> pixels;
  uint32_t label_mask = 0;
};

// Bresenham rasterization, endpoints inclusive. The pair is canonicalized so
// rasterize_line(a, b) is exactly the reverse of rasterize_line(b, a);
// tied midpoints round half away from zero along the secondary axis.
std::vector<PixelCoord> rasterize_line(PixelCoord a, PixelCoord b);

// Fixed-capacity variant used on the training path; returns pixel count.
// cap must be >= max(|dx|,|dy|) + 1.
int rasterize_line_into(PixelCoord a, PixelCoord b, PixelCoord* buf, int cap);

struct GammaParam {
  double gamma = 10.0;
  void validate() const {
    if (gamma < 2.0) throw ConfigError("segments.gamma", "must be >= 2");
  }
};

// Compact segment record; pixels are re-rasterized on demand.
struct SegmentRecord {
  PixelCoord a, b;
  uint32_t label_mask = 0;
};

struct SegmentSets {
  int num_classes = 0;
  double gamma = 0.0;
  std::vector<SegmentRecord> all;
  std::vector<std::vector<uint32_t>> positive_per_class;  // S_c^+ indices
  std::vector<uint32_t> positive_union;                   // S^+ indices (sorted)

  size_t size() const { return all.size(); }
  size_t num_positive(int c) const { return positive_per_class[static_cast<size_t>(c)].size(); }
  size_t num_negative(int c) const { return all.size() - num_positive(c); }
  size_t num_positive_union() const { return positive_union.size(); }
  size_t num_negative_intersection() const { return all.size() - positive_union.size(); }

  LineSegment segment(size_t i) const {
    const SegmentRecord& r = all[i];
    return LineSegment{r.a, r.b, rasterize_line(r.a, r.b), r.label_mask};
  }
};

// Optional deterministic per-pixel cap for large grids; 0 disables.
struct SegmentSubsample {
  uint32_t max_pairs_per_pixel = 0;
  uint64_t seed = 0;
};

// All unordered pixel pairs with both endpoints non-ignore and Euclidean
// distance strictly below gamma, each pair once, in sorted canonical order.
// Output segments are unlabeled (label_mask 0, index sets empty).
SegmentSets enumerate_valid_segments(const ConfidentLabelMap& labels, double gamma,
                                     const SegmentSubsample& sub = {});

// Assigns boundary labels per endpoint-state disagreement and fills the
// positive index sets. Endpoints must be non-ignore.
void label_segments(SegmentSets& segs, const ConfidentLabelMap& labels);

// Label mask for one endpoint-state pair (states in ConfidentLabelMap palette).
uint32_t segment_label_mask(uint8_t state_a, uint8_t state_b);

// Offsets (dx,dy) with 0 < dx^2+dy^2 < gamma^2 restricted to the canonical
// half-plane dy > 0 or (dy == 0 and dx > 0), sorted by (dy, dx).
std::vector<PixelCoord> half_disc_offsets(double gamma);

}  // namespace milb
