#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "gfk/geometry.hpp"
#include "gfk/volume.hpp"

namespace gfk {

struct Ellipsoid {
  Vec3 center;
  Vec3 semi;

  /// Normalized radius: <= 1 inside.
  double rho(Vec3 p) const {
    const double dx = (p.x - center.x) / semi.x, dy = (p.y - center.y) / semi.y, dz = (p.z - center.z) / semi.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
};

struct Tube {
  Vec3 a;
  Vec3 b;
  double radius = 2.0;
};

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

struct PhantomOptions {
  Dims dims{128, 128, 96};
  double spacing_mm = 2.5;
  int vessels_per_lung = 8;
};

/// Analytic chest: elliptic body cylinder, two lung ellipsoids, vessel tubes and
/// spherical lesions. World x grows to the patient's left, so the right lung has
/// the smaller x.
struct Phantom {
  Grid grid;
  double body_semi_x = 0.0;
  double body_semi_y = 0.0;
  Vec3 body_center;
  std::array<Ellipsoid, 2> lungs;  // [0] right, [1] left
  std::vector<Tube> vessels;
  std::vector<Sphere> nodules;
  std::vector<Sphere> non_nodules;

  bool in_body(Vec3 p) const;
  /// Lung index containing p, or -1.
  int lung_of(Vec3 p) const;
};

inline constexpr std::int16_t kAirHu = -1000;
inline constexpr std::int16_t kLungHu = -850;
inline constexpr std::int16_t kTissueHu = 20;
inline constexpr std::int16_t kVesselHu = 50;
inline constexpr std::int16_t kNoduleHu = 40;
inline constexpr std::int16_t kNonNoduleHu = 30;

/// Body and lungs scaled to the field of view; no vessels or lesions yet.
Phantom make_anatomy(const PhantomOptions& options);

/// Adds random vessel tubes inside each lung.
void add_vessels(Phantom& phantom, int per_lung, std::mt19937_64& rng);

/// Renders Hounsfield values with Gaussian noise of `noise_hu` standard deviation.
ScanVolume render_phantom(const Phantom& phantom, double noise_hu, std::mt19937_64& rng);

/// Voxels whose centers lie inside either lung ellipsoid.
LungMask analytic_lung_mask(const Phantom& phantom);

}  // namespace gfk
