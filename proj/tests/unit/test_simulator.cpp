#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "hetsched/catalog.hpp"
#include "hetsched/chromosome.hpp"
#include "hetsched/error.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/simulator.hpp"
#include "oracles.hpp"

using namespace hetsched;
using hetsched::testing::chain;
using hetsched::testing::cpu_npu_profile;
using hetsched::testing::make_workload;

namespace {

// CPU and GPU without launch or contraction effects, same dtype everywhere.
DeviceProfile linear_cpu_gpu(const std::string& net, std::vector<double> cpu,
                             std::vector<double> gpu) {
  DeviceProfile p;
  p.processors = {"CPU", "GPU"};
  p.configs = {{0, "ref", DType::fp32}, {1, "ref", DType::fp32}};
  p.nonlin = {NonLinearityParams{}, NonLinearityParams{}};
  p.layer_costs[net] = {std::move(cpu), std::move(gpu)};
  return p;
}

Solution solve(const Workload& w, const CostModel& cost, std::vector<std::vector<std::uint8_t>> cuts,
               std::vector<std::vector<std::size_t>> procs, std::vector<std::size_t> priority) {
  std::vector<PartitionedNetwork> parts;
  for (std::size_t m = 0; m < w.network_count(); ++m)
    parts.push_back(decode_partition(w.network(m), cuts[m]));
  return build_solution(w, cost, std::move(parts), procs, std::move(priority));
}

SimConfig one_shot(std::size_t groups, double period = 1e6) {
  SimConfig c;
  c.requests = 1;
  c.period_us.assign(groups, period);
  return c;
}

struct Catalog9 {
  Catalog catalog = builtin_catalog();
  std::shared_ptr<const DeviceProfile> profile =
      std::make_shared<const DeviceProfile>(derive_profile(catalog, default_device()));
  CostModel cost{profile};
};

Chromosome random_chromosome(const Workload& w, std::size_t processors, std::mt19937_64& rng) {
  Chromosome c;
  for (std::size_t m = 0; m < w.network_count(); ++m) {
    std::vector<std::uint8_t> bits(w.network(m).edge_count());
    for (auto& b : bits) b = (rng() % 4) == 0;
    std::vector<std::uint16_t> genes(w.network(m).layer_count());
    for (auto& g : genes) g = static_cast<std::uint16_t>(rng() % processors);
    c.partition.push_back(bits);
    c.mapping.push_back(genes);
    c.priority.push_back(m);
  }
  std::shuffle(c.priority.begin(), c.priority.end(), rng);
  return c;
}

}  // namespace

TEST(Simulate, SingleTaskOnHost) {
  auto w = make_workload({{"a"}}, {chain("a", 1, 64)});
  CostModel cost(std::make_shared<const DeviceProfile>(linear_cpu_gpu("a", {1000}, {1})));
  auto sol = solve(w, cost, {{}}, {{0}}, {0});
  auto trace = simulate(sol, w, cost.profile(), one_shot(1));
  ASSERT_EQ(trace.requests.size(), 1u);
  EXPECT_DOUBLE_EQ(trace.requests[0].finish - trace.requests[0].arrival, 1000.0);
}

TEST(Simulate, CpuToGpuChainPaysBoundaryAndHostOutput) {
  auto w = make_workload({{"a"}}, {chain("a", 2, 1 << 20, 4096, 2048)});
  auto profile = std::make_shared<const DeviceProfile>(linear_cpu_gpu("a", {1000, 5}, {5, 2000}));
  CostModel cost(profile);
  auto sol = solve(w, cost, {{1}}, {{0, 1}}, {0});
  auto trace = simulate(sol, w, *profile, one_shot(1));
  const double boundary = comm_cost(1 << 20, 0, 1, profile->comm);
  const double output = comm_cost(2048, 1, 0, profile->comm);
  EXPECT_NEAR(boundary, 96.2, 0.05);
  EXPECT_DOUBLE_EQ(trace.requests[0].finish, 1000.0 + boundary + 2000.0 + output);
}

TEST(Simulate, PriorityOrdersContendingNetworks) {
  auto w = make_workload({{"a", "b"}}, {chain("a", 1, 64), chain("b", 1, 64)});
  DeviceProfile p = linear_cpu_gpu("a", {1000}, {1});
  p.layer_costs["b"] = {{1000}, {1}};
  CostModel cost(std::make_shared<const DeviceProfile>(p));
  auto sol = solve(w, cost, {{}, {}}, {{0}, {0}}, {0, 1});
  auto trace = simulate(sol, w, cost.profile(), one_shot(1));
  EXPECT_DOUBLE_EQ(trace.requests[0].finish, 1000.0);
  EXPECT_DOUBLE_EQ(trace.requests[1].finish, 2000.0);

  auto swapped = solve(w, cost, {{}, {}}, {{0}, {0}}, {1, 0});
  auto t2 = simulate(swapped, w, cost.profile(), one_shot(1));
  EXPECT_DOUBLE_EQ(t2.requests[0].finish, 2000.0);
  EXPECT_DOUBLE_EQ(t2.requests[1].finish, 1000.0);
}

TEST(Simulate, ChainOnOneProcessorIsSumPlusHostIo) {
  auto w = make_workload({{"c"}}, {chain("c", 6, 300000, 70000, 90000)});
  auto profile = std::make_shared<const DeviceProfile>(
      cpu_npu_profile({{"c", {10, 20, 30, 40, 50, 60}, {100, 90, 80, 70, 60, 50}}}));
  CostModel cost(profile);
  auto sol = solve(w, cost, {{0, 1, 0, 1, 1}}, {{1, 1, 1, 1}}, {0});
  auto trace = simulate(sol, w, *profile, one_shot(1));
  double sum = 0.0;
  for (auto t : sol.networks[0].time_us) sum += t;
  const double io = comm_cost(70000, 0, 1, profile->comm) + comm_cost(90000, 1, 0, profile->comm);
  EXPECT_DOUBLE_EQ(trace.requests[0].finish, sum + io);
}

TEST(Simulate, DtypeMismatchAddsQuantization) {
  auto w = make_workload({{"c"}}, {chain("c", 2, 50000, 4096, 4096)});
  auto profile = std::make_shared<const DeviceProfile>(cpu_npu_profile({{"c", {100, 100}, {100, 100}}}));
  CostModel cost(profile);
  auto sol = solve(w, cost, {{1}}, {{0, 1}}, {0});
  auto trace = simulate(sol, w, *profile, one_shot(1));
  ASSERT_EQ(trace.tasks.size(), 2u);
  const double quant = 50000.0 / profile->quant_throughput_bytes_per_us;
  EXPECT_DOUBLE_EQ(trace.tasks[1].ready,
                   trace.tasks[0].finish + comm_cost(50000, 0, 1, profile->comm) + quant);
}

TEST(Simulate, OverheadTogglesAddPerTask) {
  auto w = make_workload({{"a"}}, {chain("a", 1, 64, 2 << 20, 64)});
  CostModel cost(std::make_shared<const DeviceProfile>(linear_cpu_gpu("a", {1000}, {1})));
  auto sol = solve(w, cost, {{}}, {{0}}, {0});
  auto cfg = one_shot(1);
  cfg.alloc_overhead_us = 7.0;
  cfg.copy_overhead_us_per_mib = 3.0;
  auto trace = simulate(sol, w, cost.profile(), cfg);
  EXPECT_DOUBLE_EQ(trace.requests[0].finish, 1000.0 + 7.0 + 2 * 3.0);
}

TEST(Simulate, RejectsInconsistentSolution) {
  auto w = make_workload({{"a"}}, {chain("a", 2, 64)});
  CostModel cost(std::make_shared<const DeviceProfile>(linear_cpu_gpu("a", {1, 1}, {1, 1})));
  auto sol = solve(w, cost, {{0}}, {{0}}, {0});
  sol.priority = {0, 0};
  EXPECT_THROW(simulate(sol, w, cost.profile(), one_shot(1)), ValidationError);
  auto cfg = one_shot(1);
  cfg.requests = 0;
  sol.priority = {0};
  EXPECT_THROW(simulate(sol, w, cost.profile(), cfg), ValidationError);
}

TEST(Simulate, InvariantsOnCatalogScenarios) {
  Catalog9 c;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    auto scenario = generate_scenario(c.catalog, 1 + trial % 2, 3, trial);
    auto w = resolve(scenario, c.catalog);
    auto sol = decode(random_chromosome(w, c.profile->processors.size(), rng), w, c.cost);
    SimConfig cfg;
    cfg.requests = 6;
    cfg.period_us = periods(0.8, base_periods(w, c.cost));
    if (trial % 3 == 0) cfg.noise = NoiseConfig{static_cast<std::uint64_t>(trial)};
    auto trace = simulate(sol, w, *c.profile, cfg);

    std::map<std::size_t, std::vector<const TaskRecord*>> by_proc;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, const TaskRecord*> index;
    for (const auto& t : trace.tasks) {
      EXPECT_LE(t.arrival, t.ready);
      EXPECT_LE(t.ready, t.start);
      EXPECT_LT(t.start, t.finish);
      by_proc[t.processor].push_back(&t);
      index[{t.request, t.network, t.subgraph}] = &t;
    }
    for (auto& [p, tasks] : by_proc) {
      std::sort(tasks.begin(), tasks.end(), [](auto a, auto b) { return a->start < b->start; });
      for (std::size_t i = 1; i < tasks.size(); ++i) EXPECT_LE(tasks[i - 1]->finish, tasks[i]->start);
      // Work conservation: the processor is busy whenever a task waits.
      for (const auto* t : tasks) {
        double covered = t->ready;
        for (const auto* o : tasks)
          if (o->start <= covered && o->finish > covered && o != t) covered = o->finish;
        EXPECT_GE(covered, t->start) << "idle gap before task on processor " << p;
      }
    }
    for (const auto& t : trace.tasks) {
      const auto& plan = sol.networks[t.network];
      for (const auto& in : plan.partition.inputs_of(t.subgraph, w.network(t.network))) {
        const auto* producer = index.at({t.request, t.network, in.producer});
        EXPECT_GE(t.ready, producer->finish + comm_cost(in.bytes, producer->processor, t.processor,
                                                        c.profile->comm) - 1e-9);
      }
    }
    ASSERT_EQ(trace.requests.size(), cfg.requests * w.network_count());

    auto again = simulate(sol, w, *c.profile, cfg);
    std::ostringstream a, b;
    write_trace_csv(a, trace, w, *c.profile);
    write_trace_csv(b, again, w, *c.profile);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Simulate, MatchesExhaustiveOracleOnSmallInstances) {
  auto w = make_workload({{"a", "b"}}, {chain("a", 2, 200000), chain("b", 2, 100000)});
  auto profile = std::make_shared<const DeviceProfile>(
      cpu_npu_profile({{"a", {300, 500}, {400, 200}}, {"b", {250, 350}, {150, 500}}}));
  CostModel cost(profile);
  std::size_t cases = 0;
  for (int cut_a = 0; cut_a < 2; ++cut_a)
    for (int cut_b = 0; cut_b < 2; ++cut_b)
      for (std::size_t procs = 0; procs < 16; ++procs) {
        std::vector<std::size_t> pa{procs & 1, (procs >> 1) & 1}, pb{(procs >> 2) & 1, (procs >> 3) & 1};
        if (!cut_a) pa.resize(1);
        if (!cut_b) pb.resize(1);
        if ((!cut_a && (procs & 2)) || (!cut_b && (procs & 8))) continue;
        auto sol = solve(w, cost, {{std::uint8_t(cut_a)}, {std::uint8_t(cut_b)}}, {pa, pb}, {1, 0});
        SimConfig cfg;
        cfg.requests = 2;
        cfg.period_us = {600.0};
        auto trace = simulate(sol, w, *profile, cfg);
        auto oracle = hetsched::testing::exhaustive_schedule(sol, w, *profile, 2, cfg.period_us);
        EXPECT_EQ(makespans(trace, w, 0), oracle.makespans[0]);
        ++cases;
      }
  EXPECT_EQ(cases, 36u);
}

TEST(EvaluateObjectives, AverageAndNearestRankP90) {
  auto w = make_workload({{"a"}}, {chain("a", 1, 64)});
  Trace trace;
  for (std::size_t j = 0; j < 10; ++j)
    trace.requests.push_back({0, j, 0, 0.0, 100.0 * static_cast<double>(10 - j)});
  auto obj = evaluate_objectives(trace, w);
  ASSERT_EQ(obj.size(), 2u);
  EXPECT_DOUBLE_EQ(obj[0], 550.0);
  EXPECT_DOUBLE_EQ(obj[1], 900.0);
}

TEST(EvaluateObjectives, SingleRequestAndTwoGroups) {
  auto w = make_workload({{"a"}, {"b"}}, {chain("a", 1, 64), chain("b", 1, 64)});
  Trace trace;
  trace.requests.push_back({0, 0, 0, 0.0, 500.0});
  trace.requests.push_back({1, 0, 1, 100.0, 400.0});
  auto obj = evaluate_objectives(trace, w);
  EXPECT_EQ(obj, (ObjectiveVector{500.0, 500.0, 300.0, 300.0}));
  EXPECT_THROW(evaluate_objectives(Trace{}, w), ValidationError);
}

TEST(Noise, UnitMeanAndDeterministic) {
  NoiseConfig n{42};
  EXPECT_EQ(noise_factor(n, 0.05, 0, 1, 2, 3), noise_factor(n, 0.05, 0, 1, 2, 3));
  EXPECT_NE(noise_factor(n, 0.05, 0, 1, 2, 3), noise_factor(n, 0.05, 0, 1, 2, 4));
  EXPECT_EQ(noise_factor(n, 0.0, 0, 1, 2, 3), 1.0);
  double sum = 0.0;
  const int count = 20000;
  for (int j = 0; j < count; ++j) sum += noise_factor(n, 0.05, 0, j, 0, 0);
  EXPECT_NEAR(sum / count, 1.0, 2e-3);
}

TEST(TraceCsv, HeaderAndRows) {
  auto w = make_workload({{"a"}}, {chain("a", 1, 64)});
  CostModel cost(std::make_shared<const DeviceProfile>(linear_cpu_gpu("a", {1000}, {1})));
  auto sol = solve(w, cost, {{}}, {{0}}, {0});
  auto trace = simulate(sol, w, cost.profile(), one_shot(1));
  std::ostringstream out;
  write_trace_csv(out, trace, w, cost.profile());
  EXPECT_EQ(out.str(),
            "group,request,network,subgraph,processor,ready,start,finish,arrival\n"
            "0,0,a,0,CPU,0,0,1000,0\n");
}
