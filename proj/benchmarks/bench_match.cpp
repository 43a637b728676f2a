#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "gfk/evaluation.hpp"
#include "gfk/fusion.hpp"

namespace {

// Nodule matching on one scan; arg 0 = truths, arg 1 = marks.
void BM_Match(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 300.0), rad(1.5, 15.0);
  std::vector<gfk::NoduleTruth> truths;
  std::vector<gfk::Mark> marks;
  for (long i = 0; i < state.range(0); ++i)
    truths.push_back({"n" + std::to_string(i), "s", {pos(rng), pos(rng), pos(rng)}, rad(rng), {}});
  for (long i = 0; i < state.range(1); ++i) {
    gfk::Mark m;
    m.id = "m" + std::to_string(i);
    m.scan_id = "s";
    m.centroid_mm = {pos(rng), pos(rng), pos(rng)};
    marks.push_back(m);
  }
  for (auto _ : state) benchmark::DoNotOptimize(gfk::match(truths, marks, {}));
}
BENCHMARK(BM_Match)->Args({10, 20})->Args({100, 200})->Args({1000, 2000});

// Agglomerative candidate merging on one scan; arg = candidates.
void BM_MergeCandidates(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.0, 100.0), size(2.0, 12.0), score(0.0, 1.0);
  std::vector<gfk::Candidate> cands;
  for (long i = 0; i < state.range(0); ++i)
    cands.push_back({"c" + std::to_string(i), "s", {pos(rng), pos(rng), pos(rng)}, size(rng), size(rng), score(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(gfk::merge_candidates(cands));
}
BENCHMARK(BM_MergeCandidates)->Arg(20)->Arg(100)->Arg(400);

}  // namespace
