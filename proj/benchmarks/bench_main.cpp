#include <benchmark/benchmark.h>

#include <random>

#include "hetsched/baselines.hpp"
#include "hetsched/catalog.hpp"
#include "hetsched/chromosome.hpp"
#include "hetsched/merkle.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/optimizer.hpp"

namespace {

using namespace hetsched;

struct Fixture {
  Catalog catalog = builtin_catalog();
  std::shared_ptr<const DeviceProfile> profile =
      std::make_shared<const DeviceProfile>(derive_profile(catalog, default_device()));
  CostModel cost{profile};
  Workload workload = resolve(generate_scenario(catalog, 2, 3, 3), catalog);
  std::vector<Chromosome> population;

  Fixture() {
    std::mt19937_64 rng(1);
    GAConfig cfg;
    population = init_population(workload, cost, cfg, rng);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_DecodePartition(benchmark::State& state) {
  const auto& g = *fixture().catalog.at("fastsam_small").graph;
  std::mt19937_64 rng(2);
  std::vector<std::uint8_t> bits(g.edge_count());
  for (auto& b : bits) b = rng() & 1;
  for (auto _ : state) benchmark::DoNotOptimize(decode_partition(g, bits));
}
BENCHMARK(BM_DecodePartition);

void BM_SubgraphHash(benchmark::State& state) {
  const auto& g = *fixture().catalog.at("fastsam_small").graph;
  const auto whole = whole_network(g);
  for (auto _ : state) benchmark::DoNotOptimize(subgraph_hash(whole, g));
}
BENCHMARK(BM_SubgraphHash);

void BM_DecodeChromosome(benchmark::State& state) {
  const auto& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(f.population[i], f.workload, f.cost));
    i = (i + 1) % f.population.size();
  }
}
BENCHMARK(BM_DecodeChromosome);

void BM_Simulate(benchmark::State& state) {
  const auto& f = fixture();
  const auto solution = decode(f.population[state.range(0)], f.workload, f.cost);
  SimConfig sim;
  sim.requests = 20;
  sim.period_us = base_periods(f.workload, f.cost);
  sim.noise = NoiseConfig{7};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(solution, f.workload, *f.profile, sim));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(10);

void BM_Nsga3Select(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<ObjectiveVector> pool(128, ObjectiveVector(4));
  for (auto& v : pool)
    for (auto& x : v) x = std::uniform_real_distribution<>(0, 1)(rng);
  const auto refs = reference_directions(4, default_divisions(4, 64));
  for (auto _ : state) benchmark::DoNotOptimize(nsga3_select(pool, 64, refs, rng));
}
BENCHMARK(BM_Nsga3Select);

}  // namespace

BENCHMARK_MAIN();
