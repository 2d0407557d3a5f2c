#include <benchmark/benchmark.h>

#include "mnclust/likelihood.hpp"
#include "mnclust/search.hpp"
#include "mnclust/sim.hpp"

namespace {

using namespace mnclust;

SimulatedDataset make_dataset(int n_clusters, int cluster_size) {
  SimulationConfig config;
  config.cluster_sizes.assign(n_clusters, cluster_size);
  config.seed = 7;
  return generate(config);
}

void bm_log_likelihood_flat(benchmark::State& state) {
  auto sim = make_dataset(static_cast<int>(state.range(0)), 6);
  PriorSpec prior = PriorSpec::flat();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(sim.dataset, sim.truth, prior).total);
  }
}
BENCHMARK(bm_log_likelihood_flat)->Arg(10)->Arg(50);

void bm_log_likelihood_normal(benchmark::State& state) {
  auto sim = make_dataset(static_cast<int>(state.range(0)), 6);
  PriorSpec prior = PriorSpec::isotropic_normal(sim.dataset.dim(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(sim.dataset, sim.truth, prior).total);
  }
}
BENCHMARK(bm_log_likelihood_normal)->Arg(10)->Arg(50);

void bm_move_delta(benchmark::State& state) {
  auto sim = make_dataset(50, 6);
  PriorSpec prior = PriorSpec::flat();
  MoveState move_state(sim.dataset, sim.truth, prior);
  int item = 0;
  for (auto _ : state) {
    int target = (move_state.cluster_of(item) + 1) % move_state.num_clusters();
    benchmark::DoNotOptimize(move_state.move_delta(item, target));
    item = (item + 1) % sim.dataset.size();
  }
}
BENCHMARK(bm_move_delta);

void bm_bhattacharyya_matrix(benchmark::State& state) {
  auto sim = make_dataset(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bhattacharyya_matrix(sim.dataset));
  }
}
BENCHMARK(bm_bhattacharyya_matrix)->Arg(10)->Arg(50);

void bm_ward_dendrogram(benchmark::State& state) {
  auto sim = make_dataset(static_cast<int>(state.range(0)), 6);
  Mat dist = bhattacharyya_matrix(sim.dataset);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ward_d2_dendrogram(dist));
  }
}
BENCHMARK(bm_ward_dendrogram)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
