#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gfk/geometry.hpp"
#include "gfk/volume.hpp"

namespace gfk::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gfk-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Body of `body_hu` with air ellipsoids centred at voxel x = 16 and x = 48 (64^3, 1 mm).
inline ScanVolume two_ellipsoid_phantom(std::int16_t body_hu = 0, Vec3 semi = {10.0, 14.0, 20.0}) {
  Grid g;
  g.dims = {64, 64, 64};
  std::vector<std::int16_t> hu(g.dims.count(), body_hu);
  for (int z = 0; z < 64; ++z)
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        for (double cx : {16.0, 48.0}) {
          const double dx = (x - cx) / semi.x, dy = (y - 32.0) / semi.y, dz = (z - 32.0) / semi.z;
          if (dx * dx + dy * dy + dz * dz <= 1.0) hu[g.dims.offset({x, y, z})] = -1000;
        }
  return ScanVolume(g, std::move(hu));
}

inline std::vector<std::uint8_t> air_bits(const ScanVolume& s, double threshold = -400.0) {
  std::vector<std::uint8_t> bits(s.data().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = s.data()[i] < threshold;
  return bits;
}

inline double dice(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    na += a[i] != 0;
    nb += b[i] != 0;
  }
  return na + nb == 0 ? 1.0 : 2.0 * double(inter) / double(na + nb);
}

}  // namespace gfk::testing
