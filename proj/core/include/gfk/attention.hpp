#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "gfk/gaze.hpp"
#include "gfk/geometry.hpp"
#include "gfk/volume.hpp"

namespace gfk {

/// Physical diameter (mm) holding 6 sigma of the foveal gaze footprint.
inline constexpr double kFovealDiameterMm = 52.0;

/// sigma in scan voxels: the foveal diameter in screen pixels, divided by zoom, over 6.
double sigma_for_zoom(double zoom, double px_pitch_mm);
double sigma_for_zoom(const ViewportState& state);

/// Rounds to 1e-3 voxel (kernel cache key); never returns less than 1e-3.
double quantize_sigma(double sigma_vox);

/// Isotropic 2D Gaussian truncated to the disc of radius 3 sigma and scaled to sum to 1/f.
struct FovealKernel {
  double sigma_vox = 0.0;
  int support_radius_vox = 0;  // ceil(3 sigma)
  std::vector<double> weights; // (2R+1)^2, row-major in (dy, dx)
  double captured_mass = 0.0;  // sampled unit-Gaussian mass inside the disc before scaling

  int width() const { return 2 * support_radius_vox + 1; }
  double at(int dx, int dy) const {
    return weights[static_cast<std::size_t>(dy + support_radius_vox) * width() + (dx + support_radius_vox)];
  }
};

FovealKernel make_foveal_kernel(double sigma_vox, double f);

/// Points sharing one (quantized) sigma, i.e. one zoom level.
struct GazeGroup {
  double sigma_vox = 0.0;
  std::vector<VoxelGazePoint> points;
};

std::vector<GazeGroup> group_by_sigma(std::span<const VoxelGazePoint> points, std::span<const ViewportState> states);

/// Per-voxel estimated observation time in seconds.
class AttentionVolume {
 public:
  AttentionVolume(Grid grid, std::vector<double> values, double f);

  const Grid& grid() const { return grid_; }
  Dims dims() const { return grid_.dims; }
  std::span<const double> values() const { return values_; }
  double at(Index3 v) const { return values_[grid_.dims.offset(v)]; }
  double total_mass() const { return total_mass_; }
  double f() const { return f_; }

 private:
  Grid grid_;
  std::vector<double> values_;
  double total_mass_ = 0.0;
  double f_ = 0.0;
};

/// Deposits one kernel per point on its slice. Clipped kernel mass is dropped.
/// Accumulation runs per slice in (t, sigma, x, y) order, so the result does not
/// depend on input order or on `jobs`.
AttentionVolume splat(std::span<const GazeGroup> groups, double f, const Grid& grid, int jobs = 1);

/// Voxel predicate with a conservative bounding box (inclusive, clipped to the volume).
struct Region {
  Index3 lo;
  Index3 hi;
  std::function<bool(Index3)> contains;

  bool empty() const { return hi.x < lo.x || hi.y < lo.y || hi.z < lo.z; }

  static Region whole(Dims dims);
  static Region box(Dims dims, Index3 lo, Index3 hi);
  static Region of_mask(const LungMask& mask);
  /// Axial cylinder in world mm: disc of `diameter_mm`, extent `height_mm` along z.
  static Region cylinder(const Grid& grid, Vec3 center_mm, double diameter_mm, double height_mm);
};

double attention_at(const AttentionVolume& att, const Region& region);

/// MET_FLOAT image plus `<stem>.json` sidecar {"total_mass", "f"}.
void write_attention(const std::filesystem::path& path, const AttentionVolume& att);
AttentionVolume read_attention(const std::filesystem::path& path);

}  // namespace gfk
