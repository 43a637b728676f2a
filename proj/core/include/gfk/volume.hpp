#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gfk/geometry.hpp"

namespace gfk {

/// CT volume of signed 16-bit Hounsfield values, x-fastest.
class ScanVolume {
 public:
  ScanVolume(Grid grid, std::vector<std::int16_t> hu);

  const Grid& grid() const { return grid_; }
  Dims dims() const { return grid_.dims; }
  Vec3 spacing() const { return grid_.spacing; }
  Vec3 origin() const { return grid_.origin; }

  std::span<const std::int16_t> data() const { return hu_; }
  std::int16_t at(Index3 v) const { return hu_[grid_.dims.offset(v)]; }

 private:
  Grid grid_;
  std::vector<std::int16_t> hu_;
};

enum class LungSide { Left, Right };

const char* to_string(LungSide side);

/// Binary lung mask on the scan lattice plus the sagittal split column.
class LungMask {
 public:
  /// split_x is derived from the mask extents; throws Errc::empty_mask when nothing is set.
  LungMask(Grid grid, std::vector<std::uint8_t> bits, bool flip_lr = false);

  const Grid& grid() const { return grid_; }
  Dims dims() const { return grid_.dims; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  bool contains(Index3 v) const { return grid_.dims.contains(v) && bits_[grid_.dims.offset(v)] != 0; }
  int split_x() const { return split_x_; }
  bool flip_lr() const { return flip_lr_; }
  std::size_t volume() const { return volume_; }

 private:
  Grid grid_;
  std::vector<std::uint8_t> bits_;
  int split_x_ = 0;
  bool flip_lr_ = false;
  std::size_t volume_ = 0;
};

/// Mean of the minimum and maximum set x-columns, rounded half up.
int compute_split_x(Dims dims, std::span<const std::uint8_t> bits);

struct LungMaskOptions {
  double hu_threshold = -400.0;
  double closing_radius_mm = 5.0;
  bool flip_lr = false;
};

/// Threshold below hu_threshold, discard air connected to the in-plane border
/// (outside the body), then close with a ball of closing_radius_mm.
LungMask estimate_lung_mask(const ScanVolume& scan, const LungMaskOptions& options = {});

/// Right iff x < split_x (scan-left holds the anatomical right lung), inverted by flip_lr.
LungSide side_of(const LungMask& mask, Index3 voxel);

}  // namespace gfk
