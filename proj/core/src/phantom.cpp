#include "gfk/phantom.hpp"

#include <algorithm>
#include <cmath>

namespace gfk {
namespace {

double segment_distance(Vec3 p, const Tube& t) {
  const Vec3 ab = t.b - t.a, ap = p - t.a;
  const double len2 = ab.x * ab.x + ab.y * ab.y + ab.z * ab.z;
  double u = len2 > 0.0 ? (ap.x * ab.x + ap.y * ab.y + ap.z * ab.z) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return distance(p, t.a + ab * u);
}

template <typename Fn>
void for_box(const Grid& g, Vec3 lo_w, Vec3 hi_w, Fn&& fn) {
  const Vec3 a = g.world_to_voxel(lo_w), b = g.world_to_voxel(hi_w);
  const int x0 = std::max(0, int(std::floor(a.x))), x1 = std::min(g.dims.x - 1, int(std::ceil(b.x)));
  const int y0 = std::max(0, int(std::floor(a.y))), y1 = std::min(g.dims.y - 1, int(std::ceil(b.y)));
  const int z0 = std::max(0, int(std::floor(a.z))), z1 = std::min(g.dims.z - 1, int(std::ceil(b.z)));
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) fn(Index3{x, y, z});
}

}  // namespace

bool Phantom::in_body(Vec3 p) const {
  const double dx = (p.x - body_center.x) / body_semi_x, dy = (p.y - body_center.y) / body_semi_y;
  return dx * dx + dy * dy <= 1.0;
}

int Phantom::lung_of(Vec3 p) const {
  for (int i = 0; i < 2; ++i)
    if (lungs[i].rho(p) <= 1.0) return i;
  return -1;
}

Phantom make_anatomy(const PhantomOptions& options) {
  Phantom ph;
  const Dims d = options.dims;
  const double s = options.spacing_mm;
  ph.grid.dims = d;
  ph.grid.spacing = {s, s, s};
  // centered in-plane; z starts at 0
  ph.grid.origin = {-0.5 * (d.x - 1) * s, -0.5 * (d.y - 1) * s, 0.0};
  const double w = d.x * s, h = d.y * s, depth = d.z * s;
  const double zc = 0.5 * (d.z - 1) * s;
  ph.body_center = {0.0, 0.0, zc};
  ph.body_semi_x = 0.47 * w;
  ph.body_semi_y = 0.34 * h;
  const Vec3 semi{0.155 * w, 0.235 * h, 0.46 * depth};
  ph.lungs[0] = {{-0.2 * w, -0.015 * h, zc}, semi};
  ph.lungs[1] = {{0.2 * w, -0.015 * h, zc}, semi};
  return ph;
}

void add_vessels(Phantom& ph, int per_lung, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(30.0, 60.0);
  for (const auto& lung : ph.lungs) {
    int added = 0, attempts = 0;
    while (added < per_lung && attempts++ < 1000 * per_lung) {
      const Vec3 a{lung.center.x + 0.6 * lung.semi.x * u(rng), lung.center.y + 0.6 * lung.semi.y * u(rng),
                   lung.center.z + 0.6 * lung.semi.z * u(rng)};
      Vec3 dir{u(rng), u(rng), u(rng)};
      const double n = norm(dir);
      if (n < 1e-3 || lung.rho(a) > 0.7) continue;
      const Vec3 b = a + dir * (len(rng) / n);
      if (lung.rho(b) > 0.8) continue;
      ph.vessels.push_back({a, b, 2.0});
      ++added;
    }
  }
}

ScanVolume render_phantom(const Phantom& ph, double noise_hu, std::mt19937_64& rng) {
  const Grid& g = ph.grid;
  std::vector<std::int16_t> hu(g.dims.count(), kAirHu);
  for (int z = 0; z < g.dims.z; ++z)
    for (int y = 0; y < g.dims.y; ++y)
      for (int x = 0; x < g.dims.x; ++x) {
        const Index3 v{x, y, z};
        const Vec3 p = g.voxel_to_world(v);
        if (!ph.in_body(p)) continue;
        hu[g.dims.offset(v)] = ph.lung_of(p) >= 0 ? kLungHu : kTissueHu;
      }
  auto paint = [&](Vec3 lo, Vec3 hi, auto inside, std::int16_t value) {
    for_box(g, lo, hi, [&](Index3 v) {
      if (inside(g.voxel_to_world(v))) hu[g.dims.offset(v)] = value;
    });
  };
  for (const Tube& t : ph.vessels) {
    const Vec3 lo{std::min(t.a.x, t.b.x) - t.radius, std::min(t.a.y, t.b.y) - t.radius,
                  std::min(t.a.z, t.b.z) - t.radius};
    const Vec3 hi{std::max(t.a.x, t.b.x) + t.radius, std::max(t.a.y, t.b.y) + t.radius,
                  std::max(t.a.z, t.b.z) + t.radius};
    paint(lo, hi, [&](Vec3 p) { return segment_distance(p, t) <= t.radius; }, kVesselHu);
  }
  auto paint_spheres = [&](const std::vector<Sphere>& spheres, std::int16_t value) {
    for (const Sphere& s : spheres) {
      const Vec3 r{s.radius, s.radius, s.radius};
      paint(s.center - r, s.center + r, [&](Vec3 p) { return distance(p, s.center) <= s.radius; }, value);
    }
  };
  paint_spheres(ph.non_nodules, kNonNoduleHu);
  paint_spheres(ph.nodules, kNoduleHu);
  if (noise_hu > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_hu);
    for (auto& v : hu) v = static_cast<std::int16_t>(std::clamp(std::lround(v + noise(rng)), -1024L, 3071L));
  }
  return ScanVolume(g, std::move(hu));
}

LungMask analytic_lung_mask(const Phantom& ph) {
  const Grid& g = ph.grid;
  std::vector<std::uint8_t> bits(g.dims.count(), 0);
  for (int z = 0; z < g.dims.z; ++z)
    for (int y = 0; y < g.dims.y; ++y)
      for (int x = 0; x < g.dims.x; ++x) {
        const Index3 v{x, y, z};
        if (ph.lung_of(g.voxel_to_world(v)) >= 0) bits[g.dims.offset(v)] = 1;
      }
  return LungMask(g, std::move(bits));
}

}  // namespace gfk
