#include <benchmark/benchmark.h>

#include "quiverstair/chain_algo.hpp"
#include "quiverstair/cycle_algo.hpp"
#include "quiverstair/linalg.hpp"
#include "quiverstair/oracle.hpp"

namespace qs = quiverstair;

namespace {

// Square Gaussian matrix of side n.
qs::ComplexMatrix gaussian(std::size_t n, std::uint64_t seed) {
  qs::Rng rng(seed);
  qs::ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  return m;
}

std::vector<qs::Orientation> alternating(std::size_t arrows) {
  std::vector<qs::Orientation> o;
  for (std::size_t i = 0; i < arrows; ++i)
    o.push_back(i % 3 == 2 ? qs::Orientation::Counterclockwise : qs::Orientation::Clockwise);
  return o;
}

// Every interval on a chain of t vertices, `copies` times each.
qs::Plant chain_plant(std::size_t t, std::size_t copies) {
  qs::PlantSpec spec{qs::QuiverShape::chain(alternating(t - 1)), {}, {}, 7};
  for (std::size_t k = 0; k < copies; ++k)
    for (long i = 1; i <= static_cast<long>(t); ++i)
      for (long j = i; j <= static_cast<long>(t); ++j) spec.labels.push_back(qs::IndecomposableLabel::interval(i, j));
  return qs::plant(spec);
}

// Walks of lengths 1..max_len starting at every vertex plus two regular
// eigenvalues.
qs::Plant cycle_plant(std::size_t t, long max_len) {
  qs::PlantSpec spec{qs::QuiverShape::cycle(alternating(t)), {}, {2.0, {1.0, 1.0}}, 11};
  for (long l = 1; l <= static_cast<long>(t); ++l)
    for (long len = 1; len <= max_len; len += 2) spec.labels.push_back(qs::IndecomposableLabel::walk(l, l + len - 1));
  return qs::plant(spec);
}

void BM_Svd(benchmark::State& state) {
  const auto m = gaussian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(qs::svd(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Svd)->RangeMultiplier(2)->Range(4, 64)->Complexity(benchmark::oNCubed);

void BM_CanonChain(benchmark::State& state) {
  const auto p = chain_plant(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(qs::canon_chain(p.rep));
  state.counters["total_dim"] = static_cast<double>(p.rep.total_dim());
}
BENCHMARK(BM_CanonChain)->Args({4, 1})->Args({4, 3})->Args({8, 1})->Args({8, 2})->Unit(benchmark::kMicrosecond);

void BM_Shave(benchmark::State& state) {
  const auto p = cycle_plant(static_cast<std::size_t>(state.range(0)), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qs::shave(p.rep));
  state.counters["total_dim"] = static_cast<double>(p.rep.total_dim());
}
BENCHMARK(BM_Shave)->Args({2, 4})->Args({3, 6})->Args({4, 8})->Unit(benchmark::kMillisecond);

void BM_Regularize(benchmark::State& state) {
  const auto p = cycle_plant(static_cast<std::size_t>(state.range(0)), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(qs::regularize(p.rep));
  state.counters["total_dim"] = static_cast<double>(p.rep.total_dim());
}
BENCHMARK(BM_Regularize)->Args({2, 4})->Args({3, 6})->Args({4, 8})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
