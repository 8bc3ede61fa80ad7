#include <benchmark/benchmark.h>

#include <vector>

#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"

using namespace gamp;

namespace {

// Evaluation points spread over the body and tails of each channel.
std::vector<double> points() {
  std::vector<double> p;
  for (int i = 0; i < 256; ++i) p.push_back(-8.0 + 16.0 * i / 255.0);
  return p;
}

template <class F>
void sweep(benchmark::State& state, F f) {
  const auto p = points();
  for (auto _ : state)
    for (double x : p) benchmark::DoNotOptimize(f(x));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(p.size()));
}

}  // namespace

static void BM_Probit(benchmark::State& s) { sweep(s, [](double p) { return probit_spg(1.0, p, 0.7, 0.01); }); }
BENCHMARK(BM_Probit);

static void BM_LogisticVariational(benchmark::State& s) {
  sweep(s, [](double p) { return logistic_spg(1.0, p, 0.7, 2.0); });
}
BENCHMARK(BM_LogisticVariational);

static void BM_Hinge(benchmark::State& s) { sweep(s, [](double p) { return hinge_spg(-1.0, p, 0.7); }); }
BENCHMARK(BM_Hinge);

static void BM_RobustProbit(benchmark::State& s) {
  const OutputChannel ch = OutputChannel::probit(0.1).robustified(0.2);
  sweep(s, [&](double p) { return ch.sum_product(1.0, p, 0.7); });
}
BENCHMARK(BM_RobustProbit);

static void BM_LogisticProx(benchmark::State& s) {
  const OutputChannel ch = OutputChannel::logistic(1.0);
  sweep(s, [&](double p) { return msg_prox(ch, 1.0, p, 0.7); });
}
BENCHMARK(BM_LogisticProx);

static void BM_ElasticNet(benchmark::State& s) { sweep(s, [](double r) { return elastic_net_spg(r, 0.5, 1.0, 0.25); }); }
BENCHMARK(BM_ElasticNet);

static void BM_SpikeSlab(benchmark::State& s) {
  const InputChannel ch = InputChannel::spike_slab(0.05, InputChannel::gaussian(0.0, 1.0));
  sweep(s, [&](double r) { return ch.sum_product(r, 0.5); });
}
BENCHMARK(BM_SpikeSlab);

static void BM_GaussianMixture(benchmark::State& s) {
  const std::vector<MixtureComponent> mix{{0.3, -1.0, 1.0}, {0.4, 0.0, 0.1}, {0.3, 2.0, 0.25}};
  sweep(s, [&](double r) { return gaussian_mixture_spg(r, 0.5, mix); });
}
BENCHMARK(BM_GaussianMixture);
