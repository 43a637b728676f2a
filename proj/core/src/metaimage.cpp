#include "gfk/metaimage.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gfk/error.hpp"
#include "gfk/log.hpp"

namespace gfk {
namespace fs = std::filesystem;

const char* meta_type_name(MetaElementType type) {
  switch (type) {
    case MetaElementType::Short: return "MET_SHORT";
    case MetaElementType::UChar: return "MET_UCHAR";
    case MetaElementType::Float: return "MET_FLOAT";
  }
  return "MET_UNKNOWN";
}

namespace {

std::size_t element_size(MetaElementType type) {
  switch (type) {
    case MetaElementType::Short: return 2;
    case MetaElementType::UChar: return 1;
    case MetaElementType::Float: return 4;
  }
  return 0;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_bool(const std::string& v) {
  std::string lower(v);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "true" || lower == "1";
}

std::vector<double> parse_numbers(const fs::path& path, const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double d = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      fail(Errc::format, fmt::format("{}: key {} has non-numeric value '{}'", path.string(), key, tok));
    out.push_back(d);
  }
  return out;
}

Vec3 triple(const fs::path& path, const std::string& key, const std::string& value) {
  const auto v = parse_numbers(path, key, value);
  if (v.size() != 3) fail(Errc::format, fmt::format("{}: key {} needs 3 values, got {}", path.string(), key, v.size()));
  return {v[0], v[1], v[2]};
}

struct RawImage {
  MetaImageHeader header;
  std::vector<char> bytes;  // host byte order
};

void require_type(const fs::path& path, const MetaImageHeader& h, MetaElementType want) {
  if (h.type != want)
    fail(Errc::unsupported,
         fmt::format("{}: element type {} where {} expected", path.string(), meta_type_name(h.type), meta_type_name(want)));
}

RawImage read_raw(const fs::path& path, MetaElementType want) {
  std::size_t header_bytes = 0;
  RawImage img{parse_metaimage_header(path, &header_bytes), {}};
  require_type(path, img.header, want);
  const std::size_t esize = element_size(img.header.type);
  const std::size_t expected = img.header.grid.dims.count() * esize;

  fs::path data_path;
  std::size_t start = 0;
  if (img.header.data_file == "LOCAL") {
    data_path = path;
    start = header_bytes;
  } else {
    data_path = fs::path(img.header.data_file).is_absolute() ? fs::path(img.header.data_file)
                                                             : path.parent_path() / img.header.data_file;
  }
  std::ifstream in(data_path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot open MetaImage data file {}", data_path.string()));
  in.seekg(0, std::ios::end);
  const auto total = static_cast<std::size_t>(in.tellg());
  if (total < start || total - start != expected)
    fail(Errc::corrupt_file, fmt::format("{}: payload has {} bytes, header implies {}", data_path.string(),
                                         total < start ? 0 : total - start, expected));
  in.seekg(static_cast<std::streamoff>(start));
  img.bytes.resize(expected);
  in.read(img.bytes.data(), static_cast<std::streamsize>(expected));
  if (!in) fail(Errc::io, fmt::format("short read on {}", data_path.string()));

  const bool host_big = std::endian::native == std::endian::big;
  if (esize > 1 && img.header.big_endian != host_big) {
    for (std::size_t i = 0; i < img.bytes.size(); i += esize) std::reverse(&img.bytes[i], &img.bytes[i] + esize);
  }
  return img;
}

template <typename T>
std::vector<T> decode(const RawImage& img) {
  std::vector<T> out(img.bytes.size() / sizeof(T));
  std::memcpy(out.data(), img.bytes.data(), img.bytes.size());
  return out;
}

template <typename T>
void write_image(const fs::path& path, const Grid& grid, MetaElementType type, std::span<const T> values) {
  if (values.size() != grid.dims.count())
    fail(Errc::parameter, fmt::format("writing {}: {} values for {} voxels", path.string(), values.size(), grid.dims.count()));
  const bool local = path.extension() == ".mha";
  const fs::path raw_name = local ? fs::path() : fs::path(path.stem().string() + ".raw");

  std::string header;
  header += "ObjectType = Image\n";
  header += "NDims = 3\n";
  header += "BinaryData = True\n";
  header += "ElementByteOrderMSB = False\n";
  header += "CompressedData = False\n";
  header += "TransformMatrix = 1 0 0 0 1 0 0 0 1\n";
  header += fmt::format("Offset = {} {} {}\n", grid.origin.x, grid.origin.y, grid.origin.z);
  header += "CenterOfRotation = 0 0 0\n";
  header += "AnatomicalOrientation = RAI\n";
  header += fmt::format("ElementSpacing = {} {} {}\n", grid.spacing.x, grid.spacing.y, grid.spacing.z);
  header += fmt::format("DimSize = {} {} {}\n", grid.dims.x, grid.dims.y, grid.dims.z);
  header += fmt::format("ElementType = {}\n", meta_type_name(type));
  header += fmt::format("ElementDataFile = {}\n", local ? std::string("LOCAL") : raw_name.string());

  std::vector<char> payload(values.size() * sizeof(T));
  std::memcpy(payload.data(), values.data(), payload.size());
  if constexpr (sizeof(T) > 1) {
    if (std::endian::native == std::endian::big)
      for (std::size_t i = 0; i < payload.size(); i += sizeof(T)) std::reverse(&payload[i], &payload[i] + sizeof(T));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, fmt::format("cannot write {}", path.string()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  if (local) {
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  } else {
    const fs::path raw_path = path.parent_path() / raw_name;
    std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
    if (!raw) fail(Errc::io, fmt::format("cannot write {}", raw_path.string()));
    raw.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!raw) fail(Errc::io, fmt::format("short write on {}", raw_path.string()));
  }
  if (!out) fail(Errc::io, fmt::format("short write on {}", path.string()));
}

}  // namespace

MetaImageHeader parse_metaimage_header(const fs::path& path, std::size_t* header_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot open MetaImage header {}", path.string()));

  std::map<std::string, std::string> keys;
  std::string line;
  std::size_t consumed = 0;
  bool saw_data_file = false;
  while (std::getline(in, line)) {
    consumed += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(Errc::format, fmt::format("{}: malformed header line '{}'", path.string(), line));
    const std::string key = trim(line.substr(0, eq));
    keys[key] = trim(line.substr(eq + 1));
    if (key == "ElementDataFile") {
      saw_data_file = true;
      break;
    }
    if (consumed > (1u << 16)) break;
  }
  if (header_bytes) *header_bytes = consumed;

  auto need = [&](const char* key) -> const std::string& {
    const auto it = keys.find(key);
    if (it == keys.end()) fail(Errc::format, fmt::format("{}: missing header key {}", path.string(), key));
    return it->second;
  };

  MetaImageHeader h;
  const auto ndims = parse_numbers(path, "NDims", need("NDims"));
  if (ndims.size() != 1) fail(Errc::format, fmt::format("{}: NDims must be a single value", path.string()));
  if (ndims[0] != 3) fail(Errc::unsupported, fmt::format("{}: NDims = {} (only 3 supported)", path.string(), ndims[0]));

  const Vec3 size = triple(path, "DimSize", need("DimSize"));
  h.grid.dims = {static_cast<int>(size.x), static_cast<int>(size.y), static_cast<int>(size.z)};
  if (h.grid.dims.x <= 0 || h.grid.dims.y <= 0 || h.grid.dims.z <= 0)
    fail(Errc::format, fmt::format("{}: DimSize must be positive", path.string()));
  h.grid.spacing = triple(path, "ElementSpacing", need("ElementSpacing"));
  for (const char* alias : {"Offset", "Origin", "Position"}) {
    if (const auto it = keys.find(alias); it != keys.end()) {
      h.grid.origin = triple(path, alias, it->second);
      break;
    }
  }

  const std::string& type = need("ElementType");
  if (type == "MET_SHORT") h.type = MetaElementType::Short;
  else if (type == "MET_UCHAR") h.type = MetaElementType::UChar;
  else if (type == "MET_FLOAT") h.type = MetaElementType::Float;
  else fail(Errc::unsupported, fmt::format("{}: unsupported ElementType {}", path.string(), type));

  for (const char* key : {"ElementByteOrderMSB", "BinaryDataByteOrderMSB"})
    if (const auto it = keys.find(key); it != keys.end()) h.big_endian = parse_bool(it->second);
  if (const auto it = keys.find("CompressedData"); it != keys.end() && parse_bool(it->second))
    fail(Errc::unsupported, fmt::format("{}: compressed MetaImage payloads are not supported", path.string()));
  if (const auto it = keys.find("ElementNumberOfChannels"); it != keys.end() && trim(it->second) != "1")
    fail(Errc::unsupported, fmt::format("{}: multi-channel images are not supported", path.string()));
  if (const auto it = keys.find("TransformMatrix"); it != keys.end()) {
    const auto m = parse_numbers(path, "TransformMatrix", it->second);
    const std::vector<double> identity{1, 0, 0, 0, 1, 0, 0, 0, 1};
    if (m != identity) log::warn(fmt::format("{}: non-identity TransformMatrix ignored", path.string()));
  }

  if (!saw_data_file) need("ElementDataFile");
  h.data_file = keys["ElementDataFile"];
  if (h.data_file == "LIST" || h.data_file.find('%') != std::string::npos)
    fail(Errc::unsupported, fmt::format("{}: multi-file ElementDataFile '{}' not supported", path.string(), h.data_file));
  return h;
}

ScanVolume read_metaimage(const fs::path& path) {
  RawImage img = read_raw(path, MetaElementType::Short);
  if (!(img.header.grid.spacing.x > 0 && img.header.grid.spacing.y > 0 && img.header.grid.spacing.z > 0))
    fail(Errc::format, fmt::format("{}: ElementSpacing must be positive", path.string()));
  return ScanVolume(img.header.grid, decode<std::int16_t>(img));
}

FloatImage read_metaimage_float(const fs::path& path) {
  RawImage img = read_raw(path, MetaElementType::Float);
  return {img.header.grid, decode<float>(img)};
}

ByteImage read_metaimage_uchar(const fs::path& path) {
  RawImage img = read_raw(path, MetaElementType::UChar);
  return {img.header.grid, decode<std::uint8_t>(img)};
}

void write_metaimage(const fs::path& path, const ScanVolume& scan) {
  write_image<std::int16_t>(path, scan.grid(), MetaElementType::Short, scan.data());
}

void write_metaimage(const fs::path& path, const Grid& grid, std::span<const float> values) {
  write_image<float>(path, grid, MetaElementType::Float, values);
}

void write_metaimage(const fs::path& path, const Grid& grid, std::span<const std::uint8_t> values) {
  write_image<std::uint8_t>(path, grid, MetaElementType::UChar, values);
}

}  // namespace gfk
