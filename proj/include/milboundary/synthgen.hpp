#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "milboundary/grid.hpp"
#include "milboundary/imaging.hpp"
#include "milboundary/rng.hpp"

namespace milb {

enum class ShapeKind { Disc, Rectangle, Triangle, Ring };

struct SceneConfig {
  int image_size = 64;
  int num_classes = 3;
  int min_shapes = 1;
  int max_shapes = 3;
  double noise_amplitude = 0.05;  // additive uniform, in [0,1] units
  uint64_t seed = 0;
  std::vector<ShapeKind> class_kinds;  // empty: cycle disc/rect/triangle/ring by class id

  ShapeKind kind_for(int class_id) const {
    static constexpr ShapeKind kCycle[4] = {ShapeKind::Disc, ShapeKind::Rectangle,
                                            ShapeKind::Triangle, ShapeKind::Ring};
    if (!class_kinds.empty()) return class_kinds[static_cast<size_t>(class_id) % class_kinds.size()];
    return kCycle[static_cast<size_t>(class_id) % 4];
  }

  void validate() const {
    if (num_classes < 2) throw ConfigError("scene.num_classes", "must be >= 2");
    if (num_classes > 31) throw ConfigError("scene.num_classes", "must be <= 31");
    if (image_size < 32) throw ConfigError("scene.image_size", "must be >= 32");
    if (min_shapes < 1 || max_shapes < min_shapes)
      throw ConfigError("scene.shapes_per_image", "range must be non-empty with min >= 1");
    if (noise_amplitude < 0) throw ConfigError("scene.noise_amplitude", "must be >= 0");
  }
};

struct CamDegradation {
  double blur_sigma = 0.0;
  double erosion_radius = 0.0;
  double part_bias = 0.0;  // 0 disables; otherwise keeps a random sub-region of
                           // area >= part_bias * |region|
  double noise_amplitude = 0.0;

  void validate() const {
    if (blur_sigma < 0 || erosion_radius < 0 || noise_amplitude < 0 || part_bias < 0 ||
        part_bias > 1)
      throw ConfigError("cam", "degradation fields must be non-negative, part_bias <= 1");
  }
};

struct Sample {
  Image8 image;
  std::vector<int> image_labels;  // sorted class ids present in gt_mask
  SegMask gt_mask;
  BoundaryLabelMap gt_boundaries;
  MultiGridF cams;  // one normalized channel per class
};

// Binary erosion with a Euclidean-disc structuring element (offsets with
// dx^2+dy^2 <= radius^2); out-of-bounds counts as background.
GridU8 erode_disc(const GridU8& region, double radius);

MultiGridF simulate_cam(const SegMask& gt_mask, const CamDegradation& deg, Rng& rng);

// Mean IoU between thresholded CAM support and the ground-truth class region,
// over classes present in the mask.
double cam_quality(const MultiGridF& cams, const SegMask& gt_mask, double fg_threshold);

Sample generate_scene(const SceneConfig& cfg, const CamDegradation& deg, int index);

inline Sample generate_scene(const SceneConfig& cfg, int index) {
  return generate_scene(cfg, CamDegradation{}, index);
}

}  // namespace milb
