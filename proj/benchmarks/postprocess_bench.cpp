#include <benchmark/benchmark.h>

#include "hnirm/postprocess.hpp"
#include "hnirm/rng.hpp"
#include "hnirm/within_school.hpp"

namespace {

using namespace hnirm;

Matrix random_distances(int r, std::uint64_t seed) {
  Rng rng(seed);
  Matrix P(r, 2);
  for (int q = 0; q < r; ++q) {
    P(q, 0) = 2.0 * rng.normal();
    P(q, 1) = 2.0 * rng.normal();
  }
  return pairwise_distances(P);
}

void BM_kruskal_mds(benchmark::State& state) {
  const auto D = random_distances(static_cast<int>(state.range(0)), 11);
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(kruskal_mds(D, 2, rng));
  }
}

void BM_spectral_cluster(benchmark::State& state) {
  const auto D = random_distances(static_cast<int>(state.range(0)), 13);
  for (auto _ : state) {
    Rng rng(9);
    benchmark::DoNotOptimize(spectral_cluster(D, 3, rng));
  }
}

}  // namespace

BENCHMARK(BM_kruskal_mds)->Arg(62)->Arg(72)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectral_cluster)->Arg(72)->Unit(benchmark::kMillisecond);
