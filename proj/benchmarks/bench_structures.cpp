#include <benchmark/benchmark.h>

#include "orthorange/geometry.hpp"

namespace {

void bm_rank_reduce(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> rows(n, std::vector<double>(4));
  std::uint64_t s = 88172645463325252ull;
  auto rnd = [&s] {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s % 1000000);
  };
  for (auto& r : rows)
    for (auto& c : r) c = rnd();
  for (auto _ : state) {
    auto set = orthorange::to_rank_space(rows, 4);
    benchmark::DoNotOptimize(set.coords.data());
  }
}

}  // namespace

BENCHMARK(bm_rank_reduce)->Arg(1 << 10)->Arg(1 << 12);

BENCHMARK_MAIN();
