#include "milboundary/manifest.hpp"

#include <fstream>

#include "milboundary/image_io.hpp"

namespace milb {

namespace fs = std::filesystem;
using nlohmann::json;

GridU8 encode_mask(const SegMask& mask) {
  GridU8 out(mask.labels.rows(), mask.labels.cols());
  for (int y = 0; y < out.rows(); ++y)
    for (int x = 0; x < out.cols(); ++x)
      out(y, x) = mask.labels(y, x) == kBackgroundLabel
                      ? 0
                      : static_cast<uint8_t>(mask.labels(y, x) + 1);
  return out;
}

SegMask decode_mask(const GridU8& palette, int num_classes) {
  SegMask mask;
  mask.num_classes = num_classes;
  mask.labels.resize(palette.rows(), palette.cols());
  for (int y = 0; y < palette.rows(); ++y) {
    for (int x = 0; x < palette.cols(); ++x) {
      const uint8_t v = palette(y, x);
      if (v == 0)
        mask.labels(y, x) = kBackgroundLabel;
      else if (v <= num_classes)
        mask.labels(y, x) = static_cast<uint8_t>(v - 1);
      else
        throw DecodeError("mask palette value out of range");
    }
  }
  return mask;
}

void write_boundary_channels(const fs::path& stem_path, const BoundaryLabelMap& map) {
  for (int c = 0; c < map.num_classes; ++c) {
    GridU8 plane(map.bits.rows(), map.bits.cols());
    for (int y = 0; y < plane.rows(); ++y)
      for (int x = 0; x < plane.cols(); ++x) plane(y, x) = map.test(y, x, c) ? 255 : 0;
    write_pgm(channel_path(stem_path, c), plane);
  }
}

BoundaryLabelMap read_boundary_channels(const fs::path& stem_path, int num_classes) {
  BoundaryLabelMap map;
  map.num_classes = num_classes;
  for (int c = 0; c < num_classes; ++c) {
    const GridU8 plane = read_pgm(channel_path(stem_path, c));
    if (c == 0) map.bits = Grid<uint32_t>::Zero(plane.rows(), plane.cols());
    for (int y = 0; y < plane.rows(); ++y)
      for (int x = 0; x < plane.cols(); ++x)
        if (plane(y, x)) map.set(y, x, c);
  }
  return map;
}

namespace {

json record_to_json(const SampleRecord& r) {
  return json{{"id", r.id},
              {"image_labels", r.image_labels},
              {"image", r.image_stem},
              {"mask", r.mask_path},
              {"boundaries", r.boundary_stem},
              {"cams", r.cam_stem}};
}

SampleRecord record_from_json(const json& j) {
  SampleRecord r;
  r.id = j.at("id").get<int>();
  r.image_labels = j.at("image_labels").get<std::vector<int>>();
  r.image_stem = j.at("image").get<std::string>();
  r.mask_path = j.at("mask").get<std::string>();
  r.boundary_stem = j.at("boundaries").get<std::string>();
  r.cam_stem = j.at("cams").get<std::string>();
  return r;
}

}  // namespace

void write_manifest(const fs::path& dir, const DatasetManifest& manifest) {
  json j;
  j["num_classes"] = manifest.num_classes;
  j["image_size"] = manifest.image_size;
  j["seed"] = manifest.seed;
  j["config"] = manifest.config_echo;
  j["samples"] = json::array();
  for (const auto& r : manifest.samples) j["samples"].push_back(record_to_json(r));
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DecodeError("missing manifest.json in " + dir.string());
  json j = json::parse(in);
  DatasetManifest m;
  m.num_classes = j.at("num_classes").get<int>();
  m.image_size = j.at("image_size").get<int>();
  m.seed = j.at("seed").get<uint64_t>();
  if (j.contains("config")) m.config_echo = j["config"];
  for (const auto& rj : j.at("samples")) m.samples.push_back(record_from_json(rj));
  return m;
}

void write_sample_files(const fs::path& dir, const SampleRecord& rec, const Sample& sample) {
  write_image(dir / rec.image_stem, sample.image);
  write_pgm(dir / rec.mask_path, encode_mask(sample.gt_mask));
  write_boundary_channels(dir / rec.boundary_stem, sample.gt_boundaries);
  write_pfm_channels(dir / rec.cam_stem, sample.cams);
}

Sample load_sample(const fs::path& dir, const DatasetManifest& manifest,
                   const SampleRecord& rec) {
  Sample s;
  s.image = read_image(dir / rec.image_stem);
  s.image_labels = rec.image_labels;
  s.gt_mask = decode_mask(read_pgm(dir / rec.mask_path), manifest.num_classes);
  s.gt_boundaries = read_boundary_channels(dir / rec.boundary_stem, manifest.num_classes);
  s.cams = read_pfm_channels(dir / rec.cam_stem, manifest.num_classes);
  return s;
}

void write_pseudo_manifest(const fs::path& dir, const PseudoManifest& manifest) {
  json j;
  j["num_classes"] = manifest.num_classes;
  j["checkpoint"] = manifest.checkpoint;
  j["config"] = manifest.config_echo;
  j["records"] = json::array();
  for (const auto& r : manifest.records)
    j["records"].push_back(json{{"id", r.id},
                                {"soft", r.soft_stem},
                                {"hard", r.hard_stem},
                                {"threshold", r.threshold},
                                {"degenerate", r.degenerate}});
  std::ofstream out(dir / "pseudo_manifest.json");
  if (!out) throw std::runtime_error("cannot write pseudo_manifest in " + dir.string());
  out << j.dump(2) << "\n";
}

PseudoManifest read_pseudo_manifest(const fs::path& dir) {
  std::ifstream in(dir / "pseudo_manifest.json");
  if (!in) throw DecodeError("missing pseudo_manifest.json in " + dir.string());
  json j = json::parse(in);
  PseudoManifest m;
  m.num_classes = j.at("num_classes").get<int>();
  m.checkpoint = j.value("checkpoint", "");
  if (j.contains("config")) m.config_echo = j["config"];
  for (const auto& rj : j.at("records")) {
    PseudoRecord r;
    r.id = rj.at("id").get<int>();
    r.soft_stem = rj.at("soft").get<std::string>();
    r.hard_stem = rj.at("hard").get<std::string>();
    r.threshold = rj.at("threshold").get<double>();
    r.degenerate = rj.at("degenerate").get<bool>();
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace milb
