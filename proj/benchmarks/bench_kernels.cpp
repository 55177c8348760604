#include "qseries/qcore.hpp"

#include <benchmark/benchmark.h>

using namespace qseries;

static void BM_qpoch_inf(benchmark::State& state) {
  unsigned digits = static_cast<unsigned>(state.range(0));
  QBase q(PrecisionComplex("0.5", "0", digits));
  PrecisionComplex a("0.3", "0.2", digits);
  auto ctl = TruncationControl::for_digits(digits);
  for (auto _ : state) benchmark::DoNotOptimize(qpoch_inf(a, q, ctl));
}
BENCHMARK(BM_qpoch_inf)->Arg(40)->Arg(70);

static void BM_theta(benchmark::State& state) {
  unsigned digits = static_cast<unsigned>(state.range(0));
  QBase q(PrecisionComplex("0.5", "0", digits));
  PrecisionComplex z("0.7", "0.4", digits);
  auto ctl = TruncationControl::for_digits(digits);
  for (auto _ : state) benchmark::DoNotOptimize(theta(z, q, ctl));
}
BENCHMARK(BM_theta)->Arg(40)->Arg(70);

BENCHMARK_MAIN();
