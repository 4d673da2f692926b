#include <benchmark/benchmark.h>

#include "spdhg/operators.hpp"
#include "spdhg/random.hpp"

using namespace spdhg;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

void BM_GradientApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto op = grad2d(Shape{n, n}, Direction::horizontal);
  const Vector x = random_vector(n * n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op->apply(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_GradientApply)->Arg(32)->Arg(128)->Arg(256);

void BM_ConvolutionApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Kernel k{5, 5, Vector(25, 1.0 / 25.0)};
  const auto op = conv2d(k, Shape{n, n});
  const Vector x = random_vector(n * n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(op->apply(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_ConvolutionApply)->Arg(32)->Arg(128);

void BM_RadonBlock(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ToyRadon radon(Shape{n, n}, 60, n);
  const auto blocks = radon.partition(static_cast<std::size_t>(state.range(1)));
  const Vector x = random_vector(n * n, 3);
  const Vector y = random_vector(blocks[0]->out_shape().size(), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(blocks[0]->apply(x));
    benchmark::DoNotOptimize(blocks[0]->adjoint(y));
  }
}
BENCHMARK(BM_RadonBlock)->Args({32, 1})->Args({32, 10})->Args({64, 10});

}  // namespace
