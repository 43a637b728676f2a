#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gfk/geometry.hpp"
#include "gfk/volume.hpp"

namespace gfk {

enum class MetaElementType { Short, UChar, Float };

const char* meta_type_name(MetaElementType type);

struct MetaImageHeader {
  Grid grid;
  MetaElementType type = MetaElementType::Short;
  bool big_endian = false;
  std::string data_file;  // "LOCAL" for single-file .mha
};

/// Parses the text header only; `header_bytes` receives the length including the
/// ElementDataFile line so LOCAL payloads can be located.
MetaImageHeader parse_metaimage_header(const std::filesystem::path& path, std::size_t* header_bytes = nullptr);

/// .mhd (+ sibling .raw) or uncompressed .mha with MET_SHORT payload.
ScanVolume read_metaimage(const std::filesystem::path& path);

struct FloatImage {
  Grid grid;
  std::vector<float> values;
};
struct ByteImage {
  Grid grid;
  std::vector<std::uint8_t> values;
};

FloatImage read_metaimage_float(const std::filesystem::path& path);
ByteImage read_metaimage_uchar(const std::filesystem::path& path);

/// Writes a canonical little-endian header. `.mha` paths embed the payload
/// (ElementDataFile = LOCAL); anything else gets a sibling `<stem>.raw`.
void write_metaimage(const std::filesystem::path& path, const ScanVolume& scan);
void write_metaimage(const std::filesystem::path& path, const Grid& grid, std::span<const float> values);
void write_metaimage(const std::filesystem::path& path, const Grid& grid, std::span<const std::uint8_t> values);

}  // namespace gfk
