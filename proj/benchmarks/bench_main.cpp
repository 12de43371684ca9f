#include <benchmark/benchmark.h>

#include "qtrack/accuracy.hpp"
#include "qtrack/matching.hpp"
#include "qtrack/queue_sim.hpp"

namespace {

using namespace qtrack;

BiadjacencyMatrix dense_matrix(int n) {
  BiadjacencyMatrix a;
  a.n = n;
  a.rows.assign(n, (n == 31 ? 0x7fffffffu : ((1u << n) - 1u)));
  return a;
}

void BM_PermanentDense(benchmark::State& state) {
  const auto a = dense_matrix(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(permanent(a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PermanentDense)->DenseRange(8, 20, 4);

void BM_SimulateInfiniteServer(benchmark::State& state) {
  const QueueSpec q = make_queue(Distribution::exponential(1.0),
                                 Distribution::exponential(1.0));
  const long n = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_infinite_server(q, n, seed++));
  state.SetItemsProcessed(n * state.iterations());
}
BENCHMARK(BM_SimulateInfiniteServer)->Arg(10000)->Arg(100000);

void BM_SimulateProcessorSharing(benchmark::State& state) {
  const QueueSpec q =
      make_queue(Distribution::exponential(1.0),
                 Distribution::exponential(1.0 / 0.8),
                 Discipline::ProcessorSharing);
  const long n = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_processor_sharing(q, n, seed++));
  state.SetItemsProcessed(n * state.iterations());
}
BENCHMARK(BM_SimulateProcessorSharing)->Arg(10000)->Arg(100000);

void BM_BusyPeriods(benchmark::State& state) {
  const QueueSpec q = make_queue(Distribution::exponential(1.0),
                                 Distribution::exponential(0.5));
  const Trace trace = simulate(q, state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(busy_periods(trace));
}
BENCHMARK(BM_BusyPeriods)->Arg(100000);

void BM_MlMatch(benchmark::State& state) {
  const int b = static_cast<int>(state.range(0));
  const QueueSpec q = make_queue(Distribution::exponential(2.0),
                                 Distribution::weibull(1.5, 1.0));
  // Find a busy period of the requested size.
  BusyPeriod target;
  for (std::uint64_t seed = 1; target.size() != b; ++seed) {
    for (const BusyPeriod& bp : busy_periods(simulate(q, 4000, seed))) {
      if (bp.size() == b) {
        target = bp;
        break;
      }
    }
  }
  const Distribution service = Distribution::weibull(1.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ml_match(target, service));
}
BENCHMARK(BM_MlMatch)->Arg(6)->Arg(9)->Arg(12);

void BM_EstimateAccuracyFifo(benchmark::State& state) {
  const QueueSpec q = make_queue(Distribution::exponential(1.0),
                                 Distribution::weibull(1.5, 1.0));
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_accuracy(q, Policy::Fifo, 1000, 2, seed++));
}
BENCHMARK(BM_EstimateAccuracyFifo);

}  // namespace

BENCHMARK_MAIN();
