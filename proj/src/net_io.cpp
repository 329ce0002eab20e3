#include <cstring>
#include <fstream>

#include "milboundary/net.hpp"

namespace milb::netdetail {

void write_record(std::ostream& out, const std::string& name, const std::vector<uint32_t>& dims,
                  const float* data, size_t count) {
  const auto name_len = static_cast<uint32_t>(name.size());
  out.write(reinterpret_cast<const char*>(&name_len), 4);
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  const auto ndim = static_cast<uint32_t>(dims.size());
  out.write(reinterpret_cast<const char*>(&ndim), 4);
  out.write(reinterpret_cast<const char*>(dims.data()),
            static_cast<std::streamsize>(dims.size() * 4));
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
}

std::vector<std::pair<std::string, RawTensor>> read_checkpoint_records(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw DecodeError("bad checkpoint magic in " + path.string());
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (!in || version != kCheckpointVersion)
    throw DecodeError("unsupported checkpoint version in " + path.string());

  std::vector<std::pair<std::string, RawTensor>> records;
  for (;;) {
    uint32_t name_len = 0;
    in.read(reinterpret_cast<char*>(&name_len), 4);
    if (in.eof()) break;
    if (!in || name_len == 0 || name_len > 4096) throw DecodeError("bad tensor name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    uint32_t ndim = 0;
    in.read(reinterpret_cast<char*>(&ndim), 4);
    if (!in || ndim == 0 || ndim > 8) throw DecodeError("bad tensor rank for '" + name + "'");
    RawTensor t;
    t.dims.resize(ndim);
    in.read(reinterpret_cast<char*>(t.dims.data()), static_cast<std::streamsize>(ndim * 4));
    if (!in) throw DecodeError("truncated dims for '" + name + "'");
    uint64_t count = 1;
    for (uint32_t d : t.dims) count *= d;
    if (count == 0 || count > (1u << 28)) throw DecodeError("bad tensor size for '" + name + "'");
    t.data.resize(count);
    in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(count * 4));
    if (!in) throw DecodeError("truncated payload for '" + name + "'");
    records.emplace_back(std::move(name), std::move(t));
  }
  return records;
}

}  // namespace milb::netdetail
