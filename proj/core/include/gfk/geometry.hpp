#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace gfk {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;
  friend constexpr bool operator==(Index3, Index3) = default;
};

struct Dims {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr std::size_t count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) * static_cast<std::size_t>(z);
  }
  constexpr std::size_t slice_count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y);
  }
  constexpr bool contains(Index3 v) const {
    return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < x && v.y < y && v.z < z;
  }
  // x-fastest linear offset
  constexpr std::size_t offset(Index3 v) const {
    return (static_cast<std::size_t>(v.z) * static_cast<std::size_t>(y) + static_cast<std::size_t>(v.y)) *
               static_cast<std::size_t>(x) +
           static_cast<std::size_t>(v.x);
  }
  friend constexpr bool operator==(Dims, Dims) = default;
};

/// Voxel lattice placed in world millimetres. No direction cosines: axis-aligned,
/// matching the identity TransformMatrix of the MetaImage files we read and write.
struct Grid {
  Dims dims;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{};

  Vec3 voxel_to_world(Vec3 v) const {
    return {origin.x + v.x * spacing.x, origin.y + v.y * spacing.y, origin.z + v.z * spacing.z};
  }
  Vec3 voxel_to_world(Index3 v) const {
    return voxel_to_world(Vec3{double(v.x), double(v.y), double(v.z)});
  }
  Vec3 world_to_voxel(Vec3 w) const {
    return {(w.x - origin.x) / spacing.x, (w.y - origin.y) / spacing.y, (w.z - origin.z) / spacing.z};
  }
  Index3 nearest_voxel(Vec3 w) const {
    const Vec3 v = world_to_voxel(w);
    return {static_cast<int>(std::lround(v.x)), static_cast<int>(std::lround(v.y)),
            static_cast<int>(std::lround(v.z))};
  }
  bool same_lattice(const Grid& o) const { return dims == o.dims; }
};

}  // namespace gfk
