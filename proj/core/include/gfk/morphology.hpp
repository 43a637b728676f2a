#pragma once

#include <cstdint>
#include <vector>

#include "gfk/geometry.hpp"

namespace gfk {

using BinaryVolume = std::vector<std::uint8_t>;

/// Squared Euclidean distance (mm^2) from every voxel to the nearest set voxel.
/// Exact separable transform; voxels with no set voxel anywhere receive +inf.
std::vector<double> squared_distance_transform(Dims dims, Vec3 spacing, const BinaryVolume& set);

/// Dilation / erosion by the ellipsoidal voxel footprint of a ball of radius_mm.
/// The volume is treated as embedded in an unbounded background.
BinaryVolume dilate(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm);
BinaryVolume erode(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm);
BinaryVolume close(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm);

/// 6-connected component labels (0 = background, 1..n), labels in scan order.
std::vector<std::int32_t> label_components(Dims dims, const BinaryVolume& set, int* component_count = nullptr);

/// Removes components that touch the x or y faces of the volume.
BinaryVolume remove_inplane_border_components(Dims dims, const BinaryVolume& set);

/// Relative slack used when comparing a squared offset length against radius^2.
inline constexpr double kBallSlack = 1e-9;

}  // namespace gfk
