#include <benchmark/benchmark.h>

#include <vector>

#include "wdvv/config.hpp"
#include "wdvv/jet.hpp"
#include "wdvv/lg_model.hpp"
#include "wdvv/n3_top.hpp"
#include "wdvv/suites.hpp"
#include "wdvv/wdvv_core.hpp"

using namespace wdvv;

namespace {

void jet_product(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  const Jet x = Jet::variable(0, 1.3, 3, order), y = Jet::variable(1, 0.7, 3, order), z = Jet::variable(2, 2.1, 3, order);
  const Jet a = x * y + z, b = y * z + x;
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(jet_product)->DenseRange(1, 4);

void third_tensor_rational_model(benchmark::State& state) {
  const Expr F = model111::prepotential();
  const std::vector<double> p{1.0, 2.0, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(third_tensor(F, std::span<const double>(p)));
}
BENCHMARK(third_tensor_rational_model);

void associativity(benchmark::State& state) {
  const std::vector<double> p{1.0, 2.0, 3.0};
  const auto c = third_tensor(model111::prepotential(), std::span<const double>(p));
  const FlatMetric eta = model111::metric();
  for (auto _ : state) benchmark::DoNotOptimize(associativity_residual(c, eta));
}
BENCHMARK(associativity);

void canonical_chart(benchmark::State& state) {
  const std::vector<Scalar> p{0.3, 0.5, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(build_chart(1, 1, p));
}
BENCHMARK(canonical_chart);

void darboux_egoroff(benchmark::State& state) {
  const auto chart = build_chart(1, 1, std::vector<Scalar>{0.3, 0.5, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(darboux_egoroff_residual(chart));
}
BENCHMARK(darboux_egoroff);

void euler_top(benchmark::State& state) {
  const Scalar w0 = omega_on_branch(2.0, 0.9);
  const Triple start = hitchin_top_state(w0, euler_top_signs(w0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_top(2.0, start, 5.0));
}
BENCHMARK(euler_top);

void all_suites(benchmark::State& state) {
  RunConfig cfg;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(all_suites)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
