#pragma once

#include <filesystem>
#include <string>

#include "milboundary/grid.hpp"

namespace milb {

// PFM, grayscale "Pf": little-endian float32 (scale field -1.0), rows stored
// bottom-up. Non-finite payloads are rejected on both write and read.
void write_pfm(const std::filesystem::path& path, const GridF& map);
GridF read_pfm(const std::filesystem::path& path);

// PGM, binary "P5", maxval 255.
void write_pgm(const std::filesystem::path& path, const GridU8& img);
GridU8 read_pgm(const std::filesystem::path& path);

// Multi-channel maps are stored one file per channel as <stem>.c<k>.<ext>.
std::filesystem::path channel_path(const std::filesystem::path& stem_path, int channel);

void write_pfm_channels(const std::filesystem::path& stem_path, const MultiGridF& maps);
MultiGridF read_pfm_channels(const std::filesystem::path& stem_path, int num_channels);

void write_image(const std::filesystem::path& stem_path, const Image8& img);
Image8 read_image(const std::filesystem::path& stem_path);

}  // namespace milb
