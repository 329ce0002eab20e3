#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "milboundary/grid.hpp"
#include "milboundary/synthgen.hpp"

namespace milb {

struct SampleRecord {
  int id = 0;
  std::vector<int> image_labels;
  std::string image_stem;     // 3-channel PGM via .c<k>
  std::string mask_path;      // PGM palette: 0 = background, 1..C = class c+1
  std::string boundary_stem;  // per-class PGM, 0/255
  std::string cam_stem;       // per-class PFM
};

struct DatasetManifest {
  int num_classes = 0;
  int image_size = 0;
  uint64_t seed = 0;
  nlohmann::json config_echo;
  std::vector<SampleRecord> samples;
};

void write_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& dir);

// File IO for one sample's grids under the dataset directory.
void write_sample_files(const std::filesystem::path& dir, const SampleRecord& rec,
                        const Sample& sample);
Sample load_sample(const std::filesystem::path& dir, const DatasetManifest& manifest,
                   const SampleRecord& rec);

GridU8 encode_mask(const SegMask& mask);
SegMask decode_mask(const GridU8& palette, int num_classes);

struct PseudoRecord {
  int id = 0;
  std::string soft_stem;  // per-class PFM
  std::string hard_stem;  // per-class PGM, 0/255
  double threshold = 0.0;
  bool degenerate = false;
};

struct PseudoManifest {
  int num_classes = 0;
  std::string checkpoint;
  nlohmann::json config_echo;
  std::vector<PseudoRecord> records;
};

void write_pseudo_manifest(const std::filesystem::path& dir, const PseudoManifest& manifest);
PseudoManifest read_pseudo_manifest(const std::filesystem::path& dir);

BoundaryLabelMap read_boundary_channels(const std::filesystem::path& stem_path, int num_classes);
void write_boundary_channels(const std::filesystem::path& stem_path, const BoundaryLabelMap& map);

}  // namespace milb
