#include "gfk/attention.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <thread>

#include "gfk/error.hpp"
#include "gfk/metaimage.hpp"
#include "json.hpp"

namespace gfk {

double sigma_for_zoom(double zoom, double px_pitch_mm) {
  if (!(zoom > 0.0) || !(px_pitch_mm > 0.0))
    fail(Errc::parameter, fmt::format("zoom ({}) and pixel pitch ({}) must be positive", zoom, px_pitch_mm));
  const double screen_px = kFovealDiameterMm / px_pitch_mm;
  return screen_px / zoom / 6.0;
}

double sigma_for_zoom(const ViewportState& state) { return sigma_for_zoom(state.zoom, state.px_pitch); }

double quantize_sigma(double sigma_vox) { return std::max(1e-3, std::round(sigma_vox * 1000.0) / 1000.0); }

FovealKernel make_foveal_kernel(double sigma_vox, double f) {
  if (!(sigma_vox > 0.0)) fail(Errc::parameter, "kernel sigma must be positive");
  if (!(f > 0.0)) fail(Errc::parameter, "sampling frequency must be positive");
  FovealKernel k;
  k.sigma_vox = sigma_vox;
  k.support_radius_vox = static_cast<int>(std::ceil(3.0 * sigma_vox));
  const int r = k.support_radius_vox;
  const int w = k.width();
  const double cutoff = 9.0 * sigma_vox * sigma_vox;
  const double two_var = 2.0 * sigma_vox * sigma_vox;
  k.weights.assign(static_cast<std::size_t>(w) * w, 0.0);

  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double d2 = double(dx) * dx + double(dy) * dy;
      if (d2 > cutoff) continue;
      const double g = std::exp(-d2 / two_var);
      k.weights[static_cast<std::size_t>(dy + r) * w + (dx + r)] = g;
      sum += g;
    }
  k.captured_mass = sum / (std::numbers::pi * two_var);
  const double scale = 1.0 / (f * sum);
  for (double& v : k.weights) v *= scale;
  return k;
}

std::vector<GazeGroup> group_by_sigma(std::span<const VoxelGazePoint> points, std::span<const ViewportState> states) {
  std::map<long long, GazeGroup> groups;
  for (const auto& p : points) {
    if (p.state >= states.size()) fail(Errc::parameter, "gaze point refers to an unknown viewport state");
    const double sigma = quantize_sigma(sigma_for_zoom(states[p.state]));
    auto& g = groups[std::llround(sigma * 1000.0)];
    g.sigma_vox = sigma;
    g.points.push_back(p);
  }
  std::vector<GazeGroup> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

AttentionVolume::AttentionVolume(Grid grid, std::vector<double> values, double f)
    : grid_(grid), values_(std::move(values)), f_(f) {
  if (values_.size() != grid_.dims.count()) fail(Errc::parameter, "attention values do not match grid size");
  for (double v : values_) {
    if (!(v >= 0.0)) fail(Errc::parameter, "attention values must be non-negative");
    total_mass_ += v;
  }
}

namespace {

struct Deposit {
  double t;
  double sigma;
  int x;
  int y;
  int z;
  const FovealKernel* kernel;
};

void deposit(std::vector<double>& values, Dims dims, const Deposit& d) {
  const FovealKernel& k = *d.kernel;
  const int r = k.support_radius_vox;
  const int y0 = std::max(0, d.y - r), y1 = std::min(dims.y - 1, d.y + r);
  const int x0 = std::max(0, d.x - r), x1 = std::min(dims.x - 1, d.x + r);
  for (int y = y0; y <= y1; ++y) {
    double* row = &values[dims.offset({0, y, d.z})];
    const double* krow = &k.weights[static_cast<std::size_t>(y - d.y + r) * k.width()];
    for (int x = x0; x <= x1; ++x) row[x] += krow[x - d.x + r];
  }
}

}  // namespace

AttentionVolume splat(std::span<const GazeGroup> groups, double f, const Grid& grid, int jobs) {
  const Dims dims = grid.dims;
  std::map<long long, FovealKernel> kernels;
  std::vector<Deposit> deposits;
  for (const auto& g : groups) {
    const double sigma = quantize_sigma(g.sigma_vox);
    auto [it, inserted] = kernels.try_emplace(std::llround(sigma * 1000.0));
    if (inserted) it->second = make_foveal_kernel(sigma, f);
    for (const auto& p : g.points) {
      if (!dims.contains({p.x, p.y, p.z}))
        fail(Errc::bounds, fmt::format("gaze point ({},{},{}) outside the attention grid", p.x, p.y, p.z));
      deposits.push_back({p.t, sigma, p.x, p.y, p.z, &it->second});
    }
  }
  std::sort(deposits.begin(), deposits.end(), [](const Deposit& a, const Deposit& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.t != b.t) return a.t < b.t;
    if (a.sigma != b.sigma) return a.sigma < b.sigma;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });

  std::vector<double> values(dims.count(), 0.0);
  // slice boundaries in the sorted deposit list
  std::vector<std::size_t> slice_begin(static_cast<std::size_t>(dims.z) + 1, deposits.size());
  for (std::size_t i = deposits.size(); i-- > 0;) slice_begin[deposits[i].z] = i;
  for (int z = dims.z - 1; z >= 0; --z) slice_begin[z] = std::min(slice_begin[z], slice_begin[z + 1]);

  auto run_slices = [&](int z_from, int z_to) {
    for (int z = z_from; z < z_to; ++z)
      for (std::size_t i = slice_begin[z]; i < slice_begin[z + 1]; ++i) deposit(values, dims, deposits[i]);
  };
  const int workers = std::clamp(jobs, 1, std::max(1, dims.z));
  if (workers == 1) {
    run_slices(0, dims.z);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (dims.z + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk, hi = std::min(dims.z, lo + chunk);
      if (lo < hi) pool.emplace_back(run_slices, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return AttentionVolume(grid, std::move(values), f);
}

Region Region::whole(Dims dims) {
  return {{0, 0, 0}, {dims.x - 1, dims.y - 1, dims.z - 1}, [](Index3) { return true; }};
}

Region Region::box(Dims dims, Index3 lo, Index3 hi) {
  Region r{{std::max(lo.x, 0), std::max(lo.y, 0), std::max(lo.z, 0)},
           {std::min(hi.x, dims.x - 1), std::min(hi.y, dims.y - 1), std::min(hi.z, dims.z - 1)},
           [](Index3) { return true; }};
  return r;
}

Region Region::of_mask(const LungMask& mask) {
  Region r = whole(mask.dims());
  r.contains = [&mask](Index3 v) { return mask.contains(v); };
  return r;
}

Region Region::cylinder(const Grid& grid, Vec3 center_mm, double diameter_mm, double height_mm) {
  const double radius = 0.5 * diameter_mm;
  const double half_h = 0.5 * height_mm;
  const Vec3 lo_w{center_mm.x - radius, center_mm.y - radius, center_mm.z - half_h};
  const Vec3 hi_w{center_mm.x + radius, center_mm.y + radius, center_mm.z + half_h};
  const Vec3 a = grid.world_to_voxel(lo_w), b = grid.world_to_voxel(hi_w);
  // spacing is positive, so a <= b per axis
  const Index3 lo{static_cast<int>(std::floor(a.x)) - 1, static_cast<int>(std::floor(a.y)) - 1,
                  static_cast<int>(std::floor(a.z)) - 1};
  const Index3 hi{static_cast<int>(std::ceil(b.x)) + 1, static_cast<int>(std::ceil(b.y)) + 1,
                  static_cast<int>(std::ceil(b.z)) + 1};
  Region r = box(grid.dims, lo, hi);
  r.contains = [grid, center_mm, radius, half_h](Index3 v) {
    const Vec3 w = grid.voxel_to_world(v);
    const double dx = w.x - center_mm.x, dy = w.y - center_mm.y;
    return dx * dx + dy * dy <= radius * radius && std::abs(w.z - center_mm.z) <= half_h;
  };
  return r;
}

double attention_at(const AttentionVolume& att, const Region& region) {
  if (region.empty()) return 0.0;
  double sum = 0.0;
  for (int z = region.lo.z; z <= region.hi.z; ++z)
    for (int y = region.lo.y; y <= region.hi.y; ++y)
      for (int x = region.lo.x; x <= region.hi.x; ++x) {
        const Index3 v{x, y, z};
        if (region.contains(v)) sum += att.at(v);
      }
  return sum;
}

void write_attention(const std::filesystem::path& path, const AttentionVolume& att) {
  std::vector<float> values(att.values().begin(), att.values().end());
  write_metaimage(path, att.grid(), std::span<const float>(values));
  nlohmann::ordered_json side;
  side["total_mass"] = att.total_mass();
  side["f"] = att.f();
  auto sidecar = path;
  sidecar.replace_extension(".json");
  std::ofstream out(sidecar);
  if (!out) fail(Errc::io, fmt::format("cannot write {}", sidecar.string()));
  out << side.dump(2) << '\n';
}

AttentionVolume read_attention(const std::filesystem::path& path) {
  FloatImage img = read_metaimage_float(path);
  auto sidecar = path;
  sidecar.replace_extension(".json");
  std::ifstream in(sidecar);
  if (!in) fail(Errc::io, fmt::format("missing attention sidecar {}", sidecar.string()));
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, fmt::format("{}: {}", sidecar.string(), e.what()));
  }
  if (!side.contains("f") || !side["f"].is_number()) fail(Errc::format, fmt::format("{}: missing \"f\"", sidecar.string()));
  std::vector<double> values(img.values.begin(), img.values.end());
  return AttentionVolume(img.grid, std::move(values), side["f"].get<double>());
}

}  // namespace gfk
