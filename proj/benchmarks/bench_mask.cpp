#include <benchmark/benchmark.h>

#include <random>

#include "gfk/phantom.hpp"
#include "gfk/volume.hpp"

namespace {

// Lung mask estimation on a rendered phantom; arg = in-plane size.
void BM_EstimateLungMask(benchmark::State& state) {
  gfk::PhantomOptions opt;
  const int n = static_cast<int>(state.range(0));
  opt.dims = {n, n, n * 3 / 4};
  opt.spacing_mm = 320.0 / n;
  gfk::Phantom ph = gfk::make_anatomy(opt);
  std::mt19937_64 rng(2);
  gfk::add_vessels(ph, 8, rng);
  const auto scan = gfk::render_phantom(ph, 15.0, rng);
  for (auto _ : state) {
    auto mask = gfk::estimate_lung_mask(scan);
    benchmark::DoNotOptimize(mask.volume());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(scan.dims().count()));
}
BENCHMARK(BM_EstimateLungMask)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
