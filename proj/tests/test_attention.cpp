#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gfk/attention.hpp"
#include "gfk/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gfk;
using gfk::testing::TempDir;

namespace {

Grid cube(int n) {
  Grid g;
  g.dims = {n, n, n};
  return g;
}

std::vector<GazeGroup> one_group(double sigma, std::vector<VoxelGazePoint> pts) { return {{sigma, std::move(pts)}}; }

std::vector<VoxelGazePoint> random_points(std::mt19937_64& rng, int n, Dims d, int margin = 0) {
  std::uniform_int_distribution<int> ux(margin, d.x - 1 - margin), uy(margin, d.y - 1 - margin), uz(0, d.z - 1);
  std::vector<VoxelGazePoint> out;
  for (int i = 0; i < n; ++i) out.push_back({i / 90.0, ux(rng), uy(rng), uz(rng), 0});
  return out;
}

}  // namespace

TEST_CASE("sigma follows the foveal diameter on screen") {
  CHECK(sigma_for_zoom(2.0, 0.26) == doctest::Approx(16.6667).epsilon(1e-4));
  CHECK(sigma_for_zoom(1.0, 0.26) == doctest::Approx(33.3333).epsilon(1e-4));
  for (double z : {0.5, 1.0, 3.7, 6.25}) CHECK(sigma_for_zoom(2 * z, 0.248) == doctest::Approx(sigma_for_zoom(z, 0.248) / 2));
  CHECK_THROWS_AS(sigma_for_zoom(0.0, 0.26), Error);
  CHECK_THROWS_AS(sigma_for_zoom(1.0, -0.1), Error);
  ViewportState st;
  st.zoom = 2.0;
  st.px_pitch = 0.26;
  CHECK(sigma_for_zoom(st) == sigma_for_zoom(2.0, 0.26));
}

TEST_CASE("kernel shape and normalisation") {
  for (double s : {0.4, 1.0, 2.5, 5.547, 16.667}) {
    const auto k = make_foveal_kernel(s, 90.0);
    const int r = k.support_radius_vox;
    CHECK(r == int(std::ceil(3 * s)));
    double sum = 0.0;
    for (double w : k.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0 / 90.0).epsilon(1e-12));
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        CHECK(k.at(dx, dy) == doctest::Approx(k.at(-dx, dy)).epsilon(1e-14));
        CHECK(k.at(dx, dy) == doctest::Approx(k.at(dy, dx)).epsilon(1e-14));
        if (dx * dx + dy * dy > 9 * s * s) CHECK(k.at(dx, dy) == 0.0);
      }
    // sampled unit Gaussian mass inside the 3 sigma disc: continuous value 1 - exp(-4.5)
    if (s > 2) CHECK(k.captured_mass == doctest::Approx(1.0 - std::exp(-4.5)).epsilon(0.01));
  }
  CHECK_THROWS_AS(make_foveal_kernel(0.0, 90), Error);
  CHECK_THROWS_AS(make_foveal_kernel(1.0, 0), Error);
}

TEST_CASE("one interior point deposits 1/f") {
  const auto att = splat(one_group(5.0, {{0.0, 32, 32, 10, 0}}), 90.0, cube(64));
  CHECK(att.total_mass() == doctest::Approx(1.0 / 90.0).epsilon(0.003));
  CHECK(att.at({32, 32, 10}) > att.at({33, 32, 10}));
  CHECK(att.at({32, 32, 11}) == 0.0);
}

TEST_CASE("no points give an all-zero volume") {
  const auto att = splat({}, 90.0, cube(16));
  CHECK(att.total_mass() == 0.0);
  CHECK(std::all_of(att.values().begin(), att.values().end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("450 interior points hold about 5 s") {
  std::mt19937_64 rng(3);
  const auto pts = random_points(rng, 450, {64, 64, 64}, 19);
  const auto att = splat(one_group(6.0, pts), 90.0, cube(64));
  CHECK(att.total_mass() == doctest::Approx(5.0).epsilon(0.003));
  const double s = std::accumulate(att.values().begin(), att.values().end(), 0.0);
  CHECK(std::abs(s - att.total_mass()) <= 1e-9 * s);
}

TEST_CASE("splat matches the dense Gaussian oracle") {
  std::mt19937_64 rng(17);
  const Dims d{40, 36, 12};
  Grid g;
  g.dims = d;
  std::vector<GazeGroup> groups;
  std::vector<oracle::SplatPoint> flat;
  for (double sigma : {0.8, 2.3, 7.1}) {
    auto pts = random_points(rng, 120, d);
    for (const auto& p : pts) flat.push_back({p.x, p.y, p.z, sigma});
    groups.push_back({sigma, pts});
  }
  const auto att = splat(groups, 90.0, g, 3);
  const auto want = oracle::dense_splat(flat, 90.0, d);
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(att.values()[i] - want[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("border kernels are clipped without renormalisation") {
  const auto att = splat(one_group(4.0, {{0.0, 0, 0, 0, 0}}), 90.0, cube(32));
  const auto k = make_foveal_kernel(4.0, 90.0);
  double quadrant = 0.0;
  for (int dy = 0; dy <= k.support_radius_vox; ++dy)
    for (int dx = 0; dx <= k.support_radius_vox; ++dx) quadrant += k.at(dx, dy);
  CHECK(att.total_mass() == doctest::Approx(quadrant).epsilon(1e-12));
  CHECK(att.total_mass() < 0.5 / 90.0);
  CHECK_THROWS_AS(splat(one_group(4.0, {{0.0, 32, 0, 0, 0}}), 90.0, cube(32)), Error);
}

TEST_CASE("splat is order and jobs invariant, bit for bit") {
  std::mt19937_64 rng(23);
  const Dims d{48, 48, 16};
  Grid g;
  g.dims = d;
  auto pts = random_points(rng, 400, d);
  for (auto& p : pts) p.t = std::uniform_real_distribution<double>(0, 10)(rng);
  std::vector<GazeGroup> groups{{3.3, {pts.begin(), pts.begin() + 200}}, {1.7, {pts.begin() + 200, pts.end()}}};
  const auto ref = splat(groups, 90.0, g, 1);
  for (int trial = 0; trial < 4; ++trial) {
    auto shuffled = groups;
    for (auto& gg : shuffled) std::shuffle(gg.points.begin(), gg.points.end(), rng);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto other = splat(shuffled, 90.0, g, 1 + trial);
    CHECK(std::equal(ref.values().begin(), ref.values().end(), other.values().begin()));
  }
}

TEST_CASE("adding a point never lowers any voxel") {
  std::mt19937_64 rng(29);
  const Dims d{32, 32, 6};
  Grid g;
  g.dims = d;
  auto pts = random_points(rng, 60, d);
  const auto before = splat(one_group(2.5, pts), 90.0, g);
  pts.push_back({99.0, 5, 7, 2, 0});
  const auto after = splat(one_group(2.5, pts), 90.0, g);
  for (std::size_t i = 0; i < before.values().size(); ++i) CHECK(after.values()[i] >= before.values()[i]);
  CHECK(after.total_mass() > before.total_mass());
}

TEST_CASE("attention_at reduces regions") {
  Grid g;
  g.dims = {10, 8, 6};
  const AttentionVolume uniform(g, std::vector<double>(g.dims.count(), 0.25), 90.0);
  CHECK(attention_at(uniform, Region::box(g.dims, {1, 1, 1}, {3, 4, 2})) == doctest::Approx(0.25 * 3 * 4 * 2));
  CHECK(attention_at(uniform, Region::whole(g.dims)) == doctest::Approx(uniform.total_mass()));
  CHECK(attention_at(uniform, Region::box(g.dims, {20, 0, 0}, {30, 5, 5})) == 0.0);
  CHECK(attention_at(uniform, Region::box(g.dims, {-5, -5, -5}, {-1, 3, 3})) == 0.0);

  std::mt19937_64 rng(31);
  std::vector<double> vals(g.dims.count());
  for (auto& v : vals) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const AttentionVolume att(g, vals, 90.0);
  const double a = attention_at(att, Region::box(g.dims, {0, 0, 0}, {4, 7, 5}));
  const double b = attention_at(att, Region::box(g.dims, {5, 0, 0}, {9, 7, 5}));
  CHECK(a + b == doctest::Approx(att.total_mass()).epsilon(1e-12));
  CHECK(attention_at(att, Region::whole(g.dims)) == doctest::Approx(att.total_mass()).epsilon(1e-12));
}

TEST_CASE("cylinder region holds the expected voxels") {
  Grid g;
  g.dims = {40, 40, 20};
  g.spacing = {1.0, 1.0, 2.0};
  const Region r = Region::cylinder(g, {20, 20, 20}, 10.0, 10.0);
  int n = 0;
  for (int z = 0; z < 20; ++z)
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) {
        const bool in = (x - 20) * (x - 20) + (y - 20) * (y - 20) <= 25 && std::abs(2 * z - 20) <= 5;
        CHECK(r.contains({x, y, z}) == in);
        if (in) {
          ++n;
          CHECK((x >= r.lo.x && x <= r.hi.x && y >= r.lo.y && y <= r.hi.y && z >= r.lo.z && z <= r.hi.z));
        }
      }
  CHECK(n == 81 * 5);
  CHECK(Region::cylinder(g, {500, 500, 500}, 10, 10).empty());
}

TEST_CASE("attention files round-trip") {
  TempDir dir("att");
  std::mt19937_64 rng(37);
  const Dims d{20, 20, 5};
  Grid g;
  g.dims = d;
  g.spacing = {0.7, 0.7, 2.5};
  const auto att = splat(one_group(2.0, random_points(rng, 50, d)), 90.0, g);
  write_attention(dir / "a.mha", att);
  const auto back = read_attention(dir / "a.mha");
  CHECK(back.f() == 90.0);
  CHECK(back.total_mass() == doctest::Approx(att.total_mass()).epsilon(1e-6));
  CHECK(back.dims() == d);
  for (std::size_t i = 0; i < att.values().size(); ++i)
    CHECK(back.values()[i] == doctest::Approx(att.values()[i]).epsilon(1e-6));
}

TEST_CASE("points are grouped by quantised sigma") {
  ViewportState a, b, c;
  a.zoom = 2.0;
  b.zoom = 2.0000001;
  c.zoom = 4.0;
  a.px_pitch = b.px_pitch = c.px_pitch = 0.26;
  const std::vector<ViewportState> states{a, b, c};
  const std::vector<VoxelGazePoint> pts{{0, 1, 1, 0, 0}, {1, 1, 1, 0, 1}, {2, 1, 1, 0, 2}, {3, 1, 1, 0, 2}};
  const auto groups = group_by_sigma(pts, states);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].sigma_vox == doctest::Approx(8.333));
  CHECK(groups[0].points.size() == 2);
  CHECK(groups[1].sigma_vox == doctest::Approx(16.667));
  CHECK(groups[1].points.size() == 2);
  const std::vector<VoxelGazePoint> bad{{0, 1, 1, 0, 7}};
  CHECK_THROWS_AS(group_by_sigma(bad, states), Error);
}
