#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace milb {

// Row-major dense grid; rows index y (height), cols index x (width).
template <typename Scalar>
using Grid = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GridF = Grid<float>;
using GridD = Grid<double>;
using GridU8 = Grid<uint8_t>;

struct PixelCoord {
  int16_t x = 0;
  int16_t y = 0;
  friend bool operator==(PixelCoord a, PixelCoord b) { return a.x == b.x && a.y == b.y; }
};

// Per-class score maps, one grid per channel, equal dims.
template <typename Scalar>
struct MultiGrid {
  std::vector<Grid<Scalar>> channels;

  MultiGrid() = default;
  MultiGrid(int num_channels, int height, int width)
      : channels(num_channels, Grid<Scalar>::Zero(height, width)) {}

  int num_channels() const { return static_cast<int>(channels.size()); }
  int height() const { return channels.empty() ? 0 : static_cast<int>(channels[0].rows()); }
  int width() const { return channels.empty() ? 0 : static_cast<int>(channels[0].cols()); }
  Grid<Scalar>& operator[](int c) { return channels[static_cast<size_t>(c)]; }
  const Grid<Scalar>& operator[](int c) const { return channels[static_cast<size_t>(c)]; }
};

using MultiGridF = MultiGrid<float>;
using MultiGridD = MultiGrid<double>;

// Segmentation mask: per-pixel label, kBackgroundLabel or class id < C.
inline constexpr uint8_t kBackgroundLabel = 255;

struct SegMask {
  GridU8 labels;  // class id or kBackgroundLabel
  int num_classes = 0;

  int height() const { return static_cast<int>(labels.rows()); }
  int width() const { return static_cast<int>(labels.cols()); }
};

// Per-pixel per-class boundary bits, packed one bit per class (C <= 31).
struct BoundaryLabelMap {
  Grid<uint32_t> bits;
  int num_classes = 0;

  BoundaryLabelMap() = default;
  BoundaryLabelMap(int height, int width, int classes)
      : bits(Grid<uint32_t>::Zero(height, width)), num_classes(classes) {}

  int height() const { return static_cast<int>(bits.rows()); }
  int width() const { return static_cast<int>(bits.cols()); }
  bool test(int y, int x, int c) const { return (bits(y, x) >> c) & 1u; }
  void set(int y, int x, int c) { bits(y, x) |= (1u << c); }

  friend bool operator==(const BoundaryLabelMap& a, const BoundaryLabelMap& b) {
    return a.num_classes == b.num_classes && a.bits.rows() == b.bits.rows() &&
           a.bits.cols() == b.bits.cols() && a.bits == b.bits;
  }
};

// Three-channel 8-bit image stored planar.
struct Image8 {
  std::array<GridU8, 3> channels;

  Image8() = default;
  Image8(int height, int width) {
    for (auto& ch : channels) ch = GridU8::Zero(height, width);
  }
  int height() const { return static_cast<int>(channels[0].rows()); }
  int width() const { return static_cast<int>(channels[0].cols()); }

  friend bool operator==(const Image8& a, const Image8& b) {
    for (int k = 0; k < 3; ++k) {
      if (a.channels[k].rows() != b.channels[k].rows() ||
          a.channels[k].cols() != b.channels[k].cols() || a.channels[k] != b.channels[k])
        return false;
    }
    return true;
  }
};

class InvalidInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace milb
