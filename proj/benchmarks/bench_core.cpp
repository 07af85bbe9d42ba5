#include <benchmark/benchmark.h>

#include "rissim/baselines.hpp"
#include "rissim/channel.hpp"
#include "rissim/ddpg.hpp"
#include "rissim/mlp.hpp"
#include "rissim/rate.hpp"

namespace {

using namespace rissim;

LongTermCsi bench_csi(int m, int n, int k) {
  LongTermCsi csi;
  csi.m = m;
  csi.n = n;
  csi.k = k;
  csi.i = 2;
  csi.kappa = 3.7e-8;
  csi.beta = Vector::Constant(k, 1.5e-7);
  csi.gamma = Vector::Constant(k, 2.3e-11);
  csi.delta = 2.2;
  csi.epsilon = Vector::Constant(k, 3.75);
  csi.eta = Vector::Constant(k, 2.2);
  Rng rng(1);
  auto draw = [&rng](int count) {
    Vector v(count);
    for (int j = 0; j < count; ++j) v[j] = rng.uniform(0.0, kTwoPi);
    return v;
  };
  csi.aoa_bs_ris = draw(2);
  csi.aod_bs_ris = draw(2);
  csi.aod_ris_user = draw(k);
  csi.aod_bs_user = draw(k);
  los_components(csi);
  return csi;
}

void BM_SampleRealization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LongTermCsi csi = bench_csi(8, n, 4);
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_realization(csi, rng));
  }
}
BENCHMARK(BM_SampleRealization)->Arg(16)->Arg(80);

void BM_Sinr(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LongTermCsi csi = bench_csi(8, n, 4);
  Rng rng(7);
  const ChannelRealization real = sample_realization(csi, rng);
  const TxConfig tx = random_tx(8, n, 4, 1.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sinr(real, tx, 3.98e-15));
  }
}
BENCHMARK(BM_Sinr)->Arg(16)->Arg(80);

void BM_ApplyAction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(7);
  TxConfig tx = random_tx(8, n, 4, 1.0, rng);
  Vector action(action_dim(8, n, 4));
  for (Eigen::Index i = 0; i < action.size(); ++i) action[i] = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tx = apply_action(tx, action));
  }
}
BENCHMARK(BM_ApplyAction)->Arg(16)->Arg(80);

void BM_MlpForwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Rng rng(7);
  const Mlp net = Mlp::random_init({420, 64, 64, 40}, OutputActivation::kTanh, rng);
  Matrix x(420, batch);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x));
  }
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64);

void BM_MlpBackwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Rng rng(7);
  const Mlp net = Mlp::random_init({420, 64, 64, 40}, OutputActivation::kTanh, rng);
  Matrix x(420, batch), upstream(40, batch);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.normal();
    for (Eigen::Index r = 0; r < upstream.rows(); ++r) upstream(r, c) = rng.normal();
  }
  BatchCache cache;
  net.forward(x, &cache);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.backward(cache, upstream));
  }
}
BENCHMARK(BM_MlpBackwardBatch)->Arg(1)->Arg(64);

void BM_InstantaneousSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LongTermCsi csi = bench_csi(8, n, 4);
  Rng rng(7);
  const ChannelRealization real = sample_realization(csi, rng);
  LocalSearchConfig cfg;
  for (auto _ : state) {
    Rng solver_rng(11);
    benchmark::DoNotOptimize(instantaneous_solve(real, 3.98e-15, 1.0, cfg, solver_rng));
  }
}
BENCHMARK(BM_InstantaneousSolve)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
