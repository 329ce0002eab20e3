#pragma once

#include <memory>
#include <string>
#include <vector>

#include "milboundary/grid.hpp"

namespace milb {

// Joint confident label map: each pixel is exactly one of background,
// class c, or ignore. Stored with the PGM palette (0 = background,
// 1..C = class c+1, 255 = ignore).
struct ConfidentLabelMap {
  static constexpr uint8_t kBackground = 0;
  static constexpr uint8_t kIgnore = 255;

  GridU8 states;
  int num_classes = 0;

  ConfidentLabelMap() = default;
  ConfidentLabelMap(int height, int width, int classes)
      : states(GridU8::Constant(height, width, kIgnore)), num_classes(classes) {}

  int height() const { return static_cast<int>(states.rows()); }
  int width() const { return static_cast<int>(states.cols()); }
  bool is_ignore(int y, int x) const { return states(y, x) == kIgnore; }
  bool is_background(int y, int x) const { return states(y, x) == kBackground; }
  // -1 when the pixel is background or ignore.
  int class_at(int y, int x) const {
    const uint8_t s = states(y, x);
    return (s == kBackground || s == kIgnore) ? -1 : static_cast<int>(s) - 1;
  }
  void set_class(int y, int x, int c) { states(y, x) = static_cast<uint8_t>(c + 1); }
  void set_background(int y, int x) { states(y, x) = kBackground; }
  void set_ignore(int y, int x) { states(y, x) = kIgnore; }
};

struct SeedThresholds {
  double fg_keep_fraction = 0.70;  // confident object: score >= 1 - fg_keep_fraction
  double bg_keep_fraction = 0.05;  // confident background: best score <= bg_keep_fraction

  void validate() const {
    if (fg_keep_fraction <= 0 || fg_keep_fraction >= 1 || bg_keep_fraction <= 0 ||
        bg_keep_fraction >= 1)
      throw ConfigError("seeds", "keep fractions must be in (0,1)");
  }
};

// Conservative pixel labeling from normalized CAMs. Only classes listed in
// image_labels participate; argmax ties go to the lowest class id.
template <typename S>
ConfidentLabelMap confident_regions(const MultiGrid<S>& cams, const std::vector<int>& image_labels,
                                    const SeedThresholds& th) {
  th.validate();
  if (image_labels.empty()) throw InvalidInputError("confident_regions: image_labels empty");
  const int c_total = cams.num_channels();
  for (int c : image_labels)
    if (c < 0 || c >= c_total) throw InvalidInputError("confident_regions: label out of range");
  const int h = cams.height(), w = cams.width();
  const S fg_cut = static_cast<S>(1.0 - th.fg_keep_fraction);
  const S bg_cut = static_cast<S>(th.bg_keep_fraction);
  ConfidentLabelMap out(h, w, c_total);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int best_c = -1;
      S best = S(0);
      for (int c : image_labels) {
        const S v = cams[c](y, x);
        if (best_c < 0 || v > best) {
          best = v;
          best_c = c;
        }
      }
      if (best >= fg_cut)
        out.set_class(y, x, best_c);
      else if (best <= bg_cut)
        out.set_background(y, x);
      else
        out.set_ignore(y, x);
    }
  }
  return out;
}

// Refinement strategy interface; the default majority filter stands in for
// dense CRF behind the same contract.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual ConfidentLabelMap refine(const ConfidentLabelMap& seed_map,
                                   const Image8& image) const = 0;
  virtual std::string name() const = 0;
};

class IdentityRefiner final : public Refiner {
 public:
  ConfidentLabelMap refine(const ConfidentLabelMap& seed_map, const Image8&) const override {
    return seed_map;
  }
  std::string name() const override { return "identity"; }
};

// Each non-ignore pixel takes the majority non-ignore state in its k x k
// window when that majority covers >= 60% of non-ignore window pixels,
// and becomes ignore otherwise. Ignore pixels are left alone.
class MajorityRefiner final : public Refiner {
 public:
  explicit MajorityRefiner(int k) : k_(k) {
    if (k < 1 || k % 2 == 0) throw ConfigError("seeds.refiner", "majority window must be odd >= 1");
  }

  ConfidentLabelMap refine(const ConfidentLabelMap& seed_map, const Image8&) const override {
    const int h = seed_map.height(), w = seed_map.width();
    const int r = k_ / 2;
    ConfidentLabelMap out = seed_map;
    std::vector<int> counts(static_cast<size_t>(seed_map.num_classes) + 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (seed_map.is_ignore(y, x)) continue;
        std::fill(counts.begin(), counts.end(), 0);
        int total = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            const uint8_t st = seed_map.states(ny, nx);
            if (st == ConfidentLabelMap::kIgnore) continue;
            ++counts[st];
            ++total;
          }
        }
        int best_state = 0, best_count = -1;
        for (size_t st = 0; st < counts.size(); ++st) {
          if (counts[st] > best_count) {
            best_count = counts[st];
            best_state = static_cast<int>(st);
          }
        }
        // majority >= 60% of non-ignore window pixels (exact: 5*count >= 3*total)
        if (5 * best_count >= 3 * total)
          out.states(y, x) = static_cast<uint8_t>(best_state);
        else
          out.set_ignore(y, x);
      }
    }
    return out;
  }

  std::string name() const override { return "majority:" + std::to_string(k_); }

 private:
  int k_;
};

// "identity" or "majority:<k>".
std::unique_ptr<Refiner> make_refiner(const std::string& spec);

inline ConfidentLabelMap refine_labels(const ConfidentLabelMap& seed_map, const Image8& image,
                                       const Refiner& refiner) {
  return refiner.refine(seed_map, image);
}

}  // namespace milb
