#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "gfk/morphology.hpp"
#include "oracles.hpp"

using namespace gfk;

namespace {

using namespace gfk::oracle;

BinaryVolume random_blobs(Dims d, std::mt19937_64& rng, double density) {
  BinaryVolume v(d.count(), 0);
  std::bernoulli_distribution b(density);
  for (auto& x : v) x = b(rng);
  return v;
}

}  // namespace

TEST_CASE("distance transform matches brute force") {
  std::mt19937_64 rng(11);
  const Dims d{9, 7, 5};
  const Vec3 s{0.7, 1.1, 2.5};
  const auto v = random_blobs(d, rng, 0.08);
  const auto dt = squared_distance_transform(d, s, v);
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        double best = std::numeric_limits<double>::infinity();
        for (int z2 = 0; z2 < d.z; ++z2)
          for (int y2 = 0; y2 < d.y; ++y2)
            for (int x2 = 0; x2 < d.x; ++x2)
              if (v[d.offset({x2, y2, z2})]) {
                const double dx = (x - x2) * s.x, dy = (y - y2) * s.y, dz = (z - z2) * s.z;
                best = std::min(best, dx * dx + dy * dy + dz * dz);
              }
        CHECK(dt[d.offset({x, y, z})] == doctest::Approx(best).epsilon(1e-12));
      }
}

TEST_CASE("distance transform of an empty set is infinite") {
  const Dims d{3, 3, 3};
  const auto dt = squared_distance_transform(d, {1, 1, 1}, BinaryVolume(27, 0));
  for (double x : dt) CHECK(std::isinf(x));
}

TEST_CASE("dilate, erode and close agree with dense oracles") {
  std::mt19937_64 rng(3);
  const std::vector<Vec3> spacings{{1, 1, 1}, {0.7, 0.7, 2.5}, {1.3, 0.9, 1.7}};
  const std::vector<double> radii{0.0, 1.0, 2.0, 3.0, 4.2};
  for (const Vec3 s : spacings)
    for (double r : radii) {
      const Dims d{14, 12, 10};
      const auto v = random_blobs(d, rng, 0.25);
      CAPTURE(r);
      CHECK(dilate(d, s, v, r) == dense_dilate(d, s, v, r));
      CHECK(erode(d, s, v, r) == dense_erode(d, s, v, r));
      CHECK(close(d, s, v, r) == dense_close(d, s, v, r));
    }
}

TEST_CASE("closing is extensive and idempotent") {
  std::mt19937_64 rng(8);
  const Dims d{16, 16, 12};
  const Vec3 s{1.0, 1.0, 2.0};
  for (int trial = 0; trial < 5; ++trial) {
    const auto v = random_blobs(d, rng, 0.3);
    const auto c = close(d, s, v, 3.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i]) CHECK(c[i]);
    CHECK(close(d, s, c, 3.0) == c);
  }
}

TEST_CASE("6-connected labelling") {
  const Dims d{4, 4, 1};
  // two diagonal-only neighbours are separate components
  BinaryVolume v{1, 0, 0, 0,
                 0, 1, 1, 0,
                 0, 0, 0, 0,
                 1, 1, 0, 1};
  int n = 0;
  const auto labels = label_components(d, v, &n);
  CHECK(n == 4);
  CHECK(labels[0] == 1);
  CHECK(labels[5] == 2);
  CHECK(labels[6] == 2);
  CHECK(labels[12] == 3);
  CHECK(labels[13] == 3);
  CHECK(labels[15] == 4);
  CHECK(labels[1] == 0);
}

TEST_CASE("border removal keeps components touching only the z faces") {
  const Dims d{5, 5, 3};
  BinaryVolume v(d.count(), 0);
  v[d.offset({0, 2, 1})] = 1;  // touches x face
  v[d.offset({2, 2, 0})] = 1;  // touches the bottom slice only
  v[d.offset({2, 2, 1})] = 1;
  v[d.offset({2, 4, 2})] = 1;  // touches y face
  const auto kept = remove_inplane_border_components(d, v);
  CHECK_FALSE(kept[d.offset({0, 2, 1})]);
  CHECK(kept[d.offset({2, 2, 0})]);
  CHECK(kept[d.offset({2, 2, 1})]);
  CHECK_FALSE(kept[d.offset({2, 4, 2})]);
}
