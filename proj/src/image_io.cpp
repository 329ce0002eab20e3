#include "milboundary/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace milb {

namespace {

void skip_pnm_whitespace(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pnm_int(std::istream& in) {
  skip_pnm_whitespace(in);
  int v = -1;
  in >> v;
  if (!in || v < 0) throw DecodeError("malformed PNM header integer");
  return v;
}

static_assert(std::endian::native == std::endian::little, "PFM writer assumes little-endian host");

}  // namespace

void write_pfm(const std::filesystem::path& path, const GridF& map) {
  if (map.rows() == 0 || map.cols() == 0) throw InvalidInputError("write_pfm: empty map");
  if (!map.allFinite()) throw InvalidInputError("write_pfm: non-finite values");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "Pf\n" << map.cols() << " " << map.rows() << "\n-1.0\n";
  // Bottom row first.
  std::vector<float> row(static_cast<size_t>(map.cols()));
  for (int y = static_cast<int>(map.rows()) - 1; y >= 0; --y) {
    for (int x = 0; x < map.cols(); ++x) row[static_cast<size_t>(x)] = map(y, x);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("short write: " + path.string());
}

GridF read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "Pf") throw DecodeError("bad PFM magic in " + path.string());
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  skip_pnm_whitespace(in);
  double scale = 0.0;
  in >> scale;
  if (!in || scale >= 0.0) throw DecodeError("PFM must be little-endian (negative scale)");
  in.get();  // single whitespace byte before payload
  if (w < 1 || h < 1) throw DecodeError("bad PFM dims");
  GridF map(h, w);
  std::vector<float> row(static_cast<size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw DecodeError("truncated PFM payload in " + path.string());
    for (int x = 0; x < w; ++x) map(y, x) = row[static_cast<size_t>(x)];
  }
  if (!map.allFinite()) throw DecodeError("non-finite PFM payload in " + path.string());
  return map;
}

void write_pgm(const std::filesystem::path& path, const GridU8& img) {
  if (img.rows() == 0 || img.cols() == 0) throw InvalidInputError("write_pgm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

GridU8 read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw DecodeError("bad PGM magic in " + path.string());
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (maxval != 255) throw DecodeError("PGM maxval must be 255");
  in.get();
  if (w < 1 || h < 1) throw DecodeError("bad PGM dims");
  GridU8 img(h, w);
  in.read(reinterpret_cast<char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (!in) throw DecodeError("truncated PGM payload in " + path.string());
  return img;
}

std::filesystem::path channel_path(const std::filesystem::path& stem_path, int channel) {
  std::filesystem::path p = stem_path;
  const std::string ext = p.extension().string();
  p.replace_extension();
  p += ".c" + std::to_string(channel) + ext;
  return p;
}

void write_pfm_channels(const std::filesystem::path& stem_path, const MultiGridF& maps) {
  for (int c = 0; c < maps.num_channels(); ++c) write_pfm(channel_path(stem_path, c), maps[c]);
}

MultiGridF read_pfm_channels(const std::filesystem::path& stem_path, int num_channels) {
  MultiGridF maps;
  maps.channels.reserve(static_cast<size_t>(num_channels));
  for (int c = 0; c < num_channels; ++c) maps.channels.push_back(read_pfm(channel_path(stem_path, c)));
  return maps;
}

void write_image(const std::filesystem::path& stem_path, const Image8& img) {
  for (int c = 0; c < 3; ++c) write_pgm(channel_path(stem_path, c), img.channels[static_cast<size_t>(c)]);
}

Image8 read_image(const std::filesystem::path& stem_path) {
  Image8 img;
  for (int c = 0; c < 3; ++c) img.channels[static_cast<size_t>(c)] = read_pgm(channel_path(stem_path, c));
  return img;
}

}  // namespace milb
