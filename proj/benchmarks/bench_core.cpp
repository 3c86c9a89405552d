// Microbenchmarks for the hot paths: posterior inference, the Kalman
// smoother, batch monitoring throughput, and the coupling-strength cubic.
#include <benchmark/benchmark.h>

#include "gpmm/datagen.hpp"
#include "gpmm/em_random.hpp"
#include "gpmm/em_sequential.hpp"
#include "gpmm/model.hpp"
#include "gpmm/monitoring.hpp"

namespace {

gpmm::RandomData benchmark_data(int samples) {
  gpmm::Scenario sc;
  sc.samples = samples;
  sc.seed = 7;
  return gpmm::gen_random(sc);
}

void bm_posterior_s_given_xy(benchmark::State& state) {
  const auto mp = gpmm::Scenario::default_params();
  const auto data = benchmark_data(1);
  const gpmm::Vector x = data.x.col(0), y = data.y.col(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpmm::posterior_sz_given_xy(mp, x, y));
  }
}
BENCHMARK(bm_posterior_s_given_xy);

void bm_smoother(benchmark::State& state) {
  auto mp = gpmm::Scenario::default_params();
  mp.u_mat = mp.v_mat;
  mp.lambda_y = mp.lambda_x;
  mp.c_y = mp.c_x;
  gpmm::Scenario sc;
  sc.kind = gpmm::ScenarioKind::SEQ_STATIONARY;
  sc.sequences = 1;
  sc.sequence_length = static_cast<int>(state.range(0));
  sc.seed = 7;
  const gpmm::Matrix seq = gpmm::gen_seq_stationary(sc)[0];
  for (auto _ : state) {
    auto st = gpmm::kalman_forward(mp, seq);
    gpmm::kalman_backward(mp, st);
    benchmark::DoNotOptimize(st);
  }
  state.SetItemsProcessed(state.iterations() * sc.sequence_length);
}
BENCHMARK(bm_smoother)->Arg(100)->Arg(1000);

void bm_monitor_batch(benchmark::State& state) {
  const auto mp = gpmm::Scenario::default_params();
  const auto specs = gpmm::build_specs_random(mp, 0.05);
  const auto data = benchmark_data(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpmm::monitor(mp, specs, data.x, data.y));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_monitor_batch)->Arg(1000)->Arg(10000);

void bm_lambda_cubic(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpmm::solve_lambda_cubic(-0.54, -0.8, -0.54, 2.0, 0.0, 1.0));
  }
}
BENCHMARK(bm_lambda_cubic);

}  // namespace

BENCHMARK_MAIN();
