#include <benchmark/benchmark.h>

#include "spdhg/experiments.hpp"
#include "spdhg/solvers.hpp"

using namespace spdhg;

namespace {

// Cost of one solver iteration on a desk-scale problem.
void bench_iteration(benchmark::State& state, ExperimentId id, Variant variant, const std::string& sampling) {
  auto cfg = default_config(id);
  cfg.variant = variant;
  cfg.sampling.kind = sampling;
  if (variant == Variant::linear) cfg.planner = "uniform";
  const auto e = build_experiment(cfg);
  const auto plan = make_plan(cfg, e.problem);
  auto st = make_state(e.problem, plan, e.problem.zero_primal(), e.problem.zero_dual(), 1);
  for (auto _ : state) step(e.problem, st, plan);
  state.counters["blocks/iter"] =
      benchmark::Counter(static_cast<double>(st.blocks_selected) / static_cast<double>(state.iterations()));
}

BENCHMARK_CAPTURE(bench_iteration, pet_tv_pdhg, ExperimentId::pet_tv, Variant::plain, "full");
BENCHMARK_CAPTURE(bench_iteration, pet_tv_spdhg, ExperimentId::pet_tv, Variant::plain, "serial");
BENCHMARK_CAPTURE(bench_iteration, tv_denoise_pa, ExperimentId::tv_denoise, Variant::primal_accel, "serial");
BENCHMARK_CAPTURE(bench_iteration, huber_deblur_da, ExperimentId::huber_deblur, Variant::dual_accel, "serial");
BENCHMARK_CAPTURE(bench_iteration, pet_linear, ExperimentId::pet_linear, Variant::linear, "serial");

}  // namespace
