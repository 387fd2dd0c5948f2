#include <benchmark/benchmark.h>

#include <vector>

#include "mcd/channel.hpp"
#include "mcd/detection.hpp"
#include "mcd/diffusion.hpp"
#include "mcd/harness.hpp"
#include "mcd/ldpc.hpp"
#include "mcd/rng.hpp"

namespace {

const mcd::SimConfig& base_config() {
  static const mcd::SimConfig config = [] {
    mcd::SimConfig c;
    c.mm_sweep = {200.0};
    return c;
  }();
  return config;
}

const mcd::SimContext& base_context() {
  static const mcd::SimContext context = mcd::make_context(
      base_config(),
      mcd::analytic_channel_response(base_config().channel,
                                     base_config().memory_duration));
  return context;
}

mcd::RxFrame sample_rx(double mm, uint64_t seed) {
  const mcd::SimContext& ctx = base_context();
  mcd::BitVector message(static_cast<size_t>(ctx.code.k));
  mcd::Xoshiro256pp rng(seed);
  for (size_t i = 0; i < message.size(); ++i) message[i] = (rng() >> 63) & 1;
  mcd::TxFrame frame;
  frame.bits = mcd::encode(ctx.code, message);
  frame.molecules_per_one = mm;
  return mcd::transmit_frame(frame, ctx.response, seed);
}

void BM_diffusion_walk(benchmark::State& state) {
  mcd::ChannelParams params;
  params.n_particles = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::simulate_channel_response(params, 17, 1));
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_diffusion_walk)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_build_code(benchmark::State& state) {
  int n = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::build_regular_code(n, n / 2, 7));
  }
}
BENCHMARK(BM_build_code)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_encode(benchmark::State& state) {
  const mcd::SimContext& ctx = base_context();
  mcd::BitVector message(static_cast<size_t>(ctx.code.k));
  mcd::Xoshiro256pp rng(3);
  for (size_t i = 0; i < message.size(); ++i) message[i] = (rng() >> 63) & 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::encode(ctx.code, message));
  }
}
BENCHMARK(BM_encode);

void BM_transmit_frame(benchmark::State& state) {
  const mcd::SimContext& ctx = base_context();
  mcd::BitVector message(static_cast<size_t>(ctx.code.k));
  mcd::Xoshiro256pp rng(5);
  for (size_t i = 0; i < message.size(); ++i) message[i] = (rng() >> 63) & 1;
  mcd::TxFrame frame;
  frame.bits = mcd::encode(ctx.code, message);
  frame.molecules_per_one = 200.0;
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::transmit_frame(frame, ctx.response, ++seed));
  }
}
BENCHMARK(BM_transmit_frame);

void BM_compute_llrs(benchmark::State& state) {
  const mcd::SimContext& ctx = base_context();
  mcd::RxFrame rx = sample_rx(200.0, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::compute_llrs(rx, 200.0, ctx.response));
  }
}
BENCHMARK(BM_compute_llrs);

void BM_compute_llrs_preequalized(benchmark::State& state) {
  const mcd::SimContext& ctx = base_context();
  mcd::RxFrame rx = sample_rx(200.0, 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mcd::compute_llrs_preequalized(rx, 200.0, 1.0, ctx.response));
  }
}
BENCHMARK(BM_compute_llrs_preequalized);

void BM_decode_bp(benchmark::State& state) {
  const mcd::SimContext& ctx = base_context();
  mcd::RxFrame rx = sample_rx(150.0, 19);
  mcd::LlrVector llr = mcd::compute_llrs(rx, 150.0, ctx.response);
  int iters = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::decode_bp(ctx.code, llr, iters));
  }
}
BENCHMARK(BM_decode_bp)->Arg(10)->Arg(50);

void BM_run_frame(benchmark::State& state) {
  mcd::SimConfig config = base_config();
  config.scheme = static_cast<mcd::Scheme>(state.range(0));
  const mcd::SimContext& ctx = base_context();
  uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcd::run_frame(ctx, config, 200.0, ++index));
  }
  state.SetLabel(mcd::scheme_name(config.scheme));
}
BENCHMARK(BM_run_frame)
    ->Arg(int(mcd::Scheme::single))
    ->Arg(int(mcd::Scheme::diversity))
    ->Arg(int(mcd::Scheme::preequalized));

}  // namespace

BENCHMARK_MAIN();
