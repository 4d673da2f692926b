#include <benchmark/benchmark.h>

#include "spdhg/prox.hpp"
#include "spdhg/random.hpp"

using namespace spdhg;

namespace {

constexpr std::size_t kSize = 4096;

Vector draw(std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  Vector v(kSize);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

void run_prox(benchmark::State& state, const ProxFunction& f, const Vector& z) {
  for (auto _ : state) benchmark::DoNotOptimize(f.prox(0.7, z));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(z.size()));
}

void BM_KlConjugate(benchmark::State& state) {
  const auto pair = kl(draw(1, 0.0, 10.0), draw(2, 0.1, 1.0));
  run_prox(state, *pair.conjugate, draw(3, -2.0, 2.0));
}
BENCHMARK(BM_KlConjugate);

void BM_SmoothedKlConjugate(benchmark::State& state) {
  const auto pair = smoothed_kl(draw(1, 0.0, 10.0), draw(2, 0.1, 1.0));
  run_prox(state, *pair.conjugate, draw(3, -2.0, 2.0));
}
BENCHMARK(BM_SmoothedKlConjugate);

void BM_HuberConjugate(benchmark::State& state) {
  const auto pair = huber(0.1, 1.0);
  run_prox(state, *pair.conjugate, draw(3, -2.0, 2.0));
}
BENCHMARK(BM_HuberConjugate);

void BM_TvProx(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = tv_prox_fgp(Shape{n, n}, 0.1, true, 20);
  Rng rng(4);
  Vector z(n * n);
  for (double& x : z) x = rng.uniform(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(f->prox(0.5, z));
}
BENCHMARK(BM_TvProx)->Arg(32)->Arg(128);

}  // namespace
