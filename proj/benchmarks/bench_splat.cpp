#include <benchmark/benchmark.h>

#include <random>

#include "gfk/attention.hpp"

namespace {

// One 3-minute session at 90 Hz on a 128x128x96 grid; arg 0 = sigma (voxels), arg 1 = jobs.
void BM_Splat(benchmark::State& state) {
  gfk::Grid g;
  g.dims = {128, 128, 96};
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> xy(0, 127), z(0, 95);
  gfk::GazeGroup group{static_cast<double>(state.range(0)), {}};
  for (int i = 0; i < 180 * 90; ++i) group.points.push_back({i / 90.0, xy(rng), xy(rng), z(rng), 0});
  const std::vector<gfk::GazeGroup> groups{group};
  for (auto _ : state) {
    auto att = gfk::splat(groups, 90.0, g, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(att.total_mass());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(group.points.size()));
}
BENCHMARK(BM_Splat)->Args({2, 1})->Args({4, 1})->Args({8, 1})->Args({4, 4})->Unit(benchmark::kMillisecond);

void BM_Kernel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gfk::make_foveal_kernel(static_cast<double>(state.range(0)), 90.0));
}
BENCHMARK(BM_Kernel)->Arg(4)->Arg(16);

}  // namespace
