#include "gfk/volume.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "gfk/error.hpp"
#include "gfk/morphology.hpp"

namespace gfk {

ScanVolume::ScanVolume(Grid grid, std::vector<std::int16_t> hu) : grid_(grid), hu_(std::move(hu)) {
  const Dims d = grid_.dims;
  if (d.x <= 0 || d.y <= 0 || d.z <= 0)
    fail(Errc::parameter, fmt::format("scan dims must be positive, got {}x{}x{}", d.x, d.y, d.z));
  if (!(grid_.spacing.x > 0 && grid_.spacing.y > 0 && grid_.spacing.z > 0))
    fail(Errc::parameter, "scan spacing must be positive");
  if (hu_.size() != d.count())
    fail(Errc::corrupt_file, fmt::format("scan data has {} values, expected {}", hu_.size(), d.count()));
}

const char* to_string(LungSide side) { return side == LungSide::Right ? "right" : "left"; }

int compute_split_x(Dims dims, std::span<const std::uint8_t> bits) {
  int lo = std::numeric_limits<int>::max();
  int hi = -1;
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y) {
      const auto* row = &bits[dims.offset({0, y, z})];
      for (int x = 0; x < dims.x; ++x)
        if (row[x]) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
    }
  if (hi < 0) fail(Errc::empty_mask, "lung mask is empty");
  return (lo + hi + 1) / 2;
}

LungMask::LungMask(Grid grid, std::vector<std::uint8_t> bits, bool flip_lr)
    : grid_(grid), bits_(std::move(bits)), flip_lr_(flip_lr) {
  if (bits_.size() != grid_.dims.count())
    fail(Errc::parameter, fmt::format("mask has {} voxels, expected {}", bits_.size(), grid_.dims.count()));
  for (auto& b : bits_) b = b ? 1 : 0;
  volume_ = static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  split_x_ = compute_split_x(grid_.dims, bits_);
}

LungMask estimate_lung_mask(const ScanVolume& scan, const LungMaskOptions& options) {
  if (options.closing_radius_mm < 0.0) fail(Errc::parameter, "closing radius must be non-negative");
  const Dims dims = scan.dims();
  BinaryVolume air(dims.count());
  const auto hu = scan.data();
  for (std::size_t i = 0; i < air.size(); ++i) air[i] = hu[i] < options.hu_threshold ? 1 : 0;

  BinaryVolume body_air = remove_inplane_border_components(dims, air);
  BinaryVolume closed = close(dims, scan.spacing(), body_air, options.closing_radius_mm);
  if (std::none_of(closed.begin(), closed.end(), [](std::uint8_t b) { return b != 0; }))
    fail(Errc::empty_mask, fmt::format("no voxels below {} HU inside the body; not a chest scan?", options.hu_threshold));
  return LungMask(scan.grid(), std::move(closed), options.flip_lr);
}

LungSide side_of(const LungMask& mask, Index3 voxel) {
  if (!mask.dims().contains(voxel))
    fail(Errc::bounds, fmt::format("voxel ({},{},{}) outside mask bounds", voxel.x, voxel.y, voxel.z));
  const bool right = voxel.x < mask.split_x();
  return (right != mask.flip_lr()) ? LungSide::Right : LungSide::Left;
}

}  // namespace gfk
