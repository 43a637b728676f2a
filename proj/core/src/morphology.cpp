#include "gfk/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gfk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas on one line (Felzenszwalb & Huttenlocher) with
// sample spacing `step`. `f` and `out` are strided views into the volume.
struct LineScratch {
  std::vector<double> f;
  std::vector<int> v;
  std::vector<double> z;
  void resize(int n) {
    f.resize(n);
    v.resize(n);
    z.resize(static_cast<std::size_t>(n) + 1);
  }
};

void transform_line(double* data, std::size_t stride, int n, double step, LineScratch& s) {
  for (int i = 0; i < n; ++i) s.f[i] = data[static_cast<std::size_t>(i) * stride];

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (std::isinf(s.f[q])) continue;
    if (k < 0) {
      k = 0;
      s.v[0] = q;
      s.z[0] = -kInf;
      s.z[1] = kInf;
      continue;
    }
    double cut = 0.0;
    while (true) {
      const int p = s.v[k];
      cut = ((s.f[q] + double(q) * q * step * step) - (s.f[p] + double(p) * p * step * step)) /
            (2.0 * step * step * (q - p));
      if (cut <= s.z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    s.v[k] = q;
    s.z[k] = cut;
    s.z[k + 1] = kInf;
  }

  if (k < 0) {
    for (int i = 0; i < n; ++i) data[static_cast<std::size_t>(i) * stride] = kInf;
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (s.z[k + 1] < q) ++k;
    const double d = (q - s.v[k]) * step;
    data[static_cast<std::size_t>(q) * stride] = d * d + s.f[s.v[k]];
  }
}

BinaryVolume threshold_at_most(const std::vector<double>& d2, double limit) {
  BinaryVolume out(d2.size());
  for (std::size_t i = 0; i < d2.size(); ++i) out[i] = d2[i] <= limit ? 1 : 0;
  return out;
}

struct Padded {
  Dims dims;
  Index3 pad;
  BinaryVolume bits;
};

Padded pad_volume(Dims dims, const BinaryVolume& set, Index3 pad) {
  Padded p{{dims.x + 2 * pad.x, dims.y + 2 * pad.y, dims.z + 2 * pad.z}, pad, {}};
  p.bits.assign(p.dims.count(), 0);
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y) {
      const auto* src = &set[dims.offset({0, y, z})];
      auto* dst = &p.bits[p.dims.offset({pad.x, y + pad.y, z + pad.z})];
      std::copy(src, src + dims.x, dst);
    }
  return p;
}

BinaryVolume crop_volume(const Padded& p, Dims dims) {
  BinaryVolume out(dims.count());
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y) {
      const auto* src = &p.bits[p.dims.offset({p.pad.x, y + p.pad.y, z + p.pad.z})];
      std::copy(src, src + dims.x, &out[dims.offset({0, y, z})]);
    }
  return out;
}

}  // namespace

std::vector<double> squared_distance_transform(Dims dims, Vec3 spacing, const BinaryVolume& set) {
  std::vector<double> d2(dims.count());
  for (std::size_t i = 0; i < d2.size(); ++i) d2[i] = set[i] ? 0.0 : kInf;

  LineScratch scratch;
  scratch.resize(std::max({dims.x, dims.y, dims.z}));
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(dims.x);
  const std::size_t sz = dims.slice_count();

  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y) transform_line(&d2[dims.offset({0, y, z})], sx, dims.x, spacing.x, scratch);
  for (int z = 0; z < dims.z; ++z)
    for (int x = 0; x < dims.x; ++x) transform_line(&d2[dims.offset({x, 0, z})], sy, dims.y, spacing.y, scratch);
  for (int y = 0; y < dims.y; ++y)
    for (int x = 0; x < dims.x; ++x) transform_line(&d2[dims.offset({x, y, 0})], sz, dims.z, spacing.z, scratch);
  return d2;
}

BinaryVolume dilate(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm) {
  const double limit = radius_mm * radius_mm * (1.0 + kBallSlack);
  return threshold_at_most(squared_distance_transform(dims, spacing, set), limit);
}

BinaryVolume erode(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm) {
  // Everything outside the volume is background; one layer of padding represents it exactly.
  Padded p = pad_volume(dims, set, {1, 1, 1});
  for (auto& b : p.bits) b = b ? 0 : 1;
  const double limit = radius_mm * radius_mm * (1.0 + kBallSlack);
  const auto d2 = squared_distance_transform(p.dims, spacing, p.bits);
  for (std::size_t i = 0; i < p.bits.size(); ++i) p.bits[i] = d2[i] > limit ? 1 : 0;
  return crop_volume(p, dims);
}

BinaryVolume close(Dims dims, Vec3 spacing, const BinaryVolume& set, double radius_mm) {
  if (radius_mm <= 0.0) return set;
  const Index3 pad{static_cast<int>(std::ceil(radius_mm / spacing.x)) + 1,
                   static_cast<int>(std::ceil(radius_mm / spacing.y)) + 1,
                   static_cast<int>(std::ceil(radius_mm / spacing.z)) + 1};
  Padded p = pad_volume(dims, set, pad);
  p.bits = erode(p.dims, spacing, dilate(p.dims, spacing, p.bits, radius_mm), radius_mm);
  return crop_volume(p, dims);
}

std::vector<std::int32_t> label_components(Dims dims, const BinaryVolume& set, int* component_count) {
  std::vector<std::int32_t> labels(dims.count(), 0);
  std::vector<std::size_t> stack;
  std::int32_t next = 0;
  const std::size_t sy = static_cast<std::size_t>(dims.x);
  const std::size_t sz = dims.slice_count();

  for (std::size_t seed = 0; seed < set.size(); ++seed) {
    if (!set[seed] || labels[seed]) continue;
    ++next;
    labels[seed] = next;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(i % sy);
      const int y = static_cast<int>((i / sy) % static_cast<std::size_t>(dims.y));
      const int z = static_cast<int>(i / sz);
      auto visit = [&](std::size_t j) {
        if (set[j] && !labels[j]) {
          labels[j] = next;
          stack.push_back(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < dims.x) visit(i + 1);
      if (y > 0) visit(i - sy);
      if (y + 1 < dims.y) visit(i + sy);
      if (z > 0) visit(i - sz);
      if (z + 1 < dims.z) visit(i + sz);
    }
  }
  if (component_count) *component_count = next;
  return labels;
}

BinaryVolume remove_inplane_border_components(Dims dims, const BinaryVolume& set) {
  int count = 0;
  const auto labels = label_components(dims, set, &count);
  std::vector<std::uint8_t> touches(static_cast<std::size_t>(count) + 1, 0);
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y)
      for (int x = 0; x < dims.x; ++x) {
        if (x != 0 && y != 0 && x != dims.x - 1 && y != dims.y - 1) continue;
        touches[labels[dims.offset({x, y, z})]] = 1;
      }
  BinaryVolume out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out[i] = (labels[i] != 0 && !touches[labels[i]]) ? 1 : 0;
  return out;
}

}  // namespace gfk
