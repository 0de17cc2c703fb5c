#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/graph.hpp"
#include "hetsched/workload.hpp"

namespace hetsched {

struct NetworkPlan {
  PartitionedNetwork partition;
  std::vector<std::size_t> processor;  // per subgraph
  std::vector<std::size_t> config;     // per subgraph
  std::vector<double> time_us;         // per subgraph, noiseless
};

// Decoded schedule. Networks follow workload order; `priority` lists network
// indices from highest to lowest priority.
struct Solution {
  std::vector<NetworkPlan> networks;
  std::vector<std::size_t> priority;
};

// Picks the fastest config of each subgraph's processor and records its time.
Solution build_solution(const Workload& workload, const CostModel& cost,
                        std::vector<PartitionedNetwork> partitions,
                        const std::vector<std::vector<std::size_t>>& processors,
                        std::vector<std::size_t> priority);

// Throws ValidationError when `solution` does not fit `workload`.
void check_solution(const Solution& solution, const Workload& workload,
                    const DeviceProfile& profile);

// Unit-mean lognormal jitter on execution times.
struct NoiseConfig {
  std::uint64_t seed = 0;
  double sigma_cpu = 0.05;
  double sigma_other = 0.01;
};

struct SimConfig {
  std::size_t requests = 20;          // J, per group
  std::vector<double> period_us;      // Φ per group
  std::optional<NoiseConfig> noise;
  double alloc_overhead_us = 0.0;     // per task
  double copy_overhead_us_per_mib = 0.0;  // per MiB of task input
};

struct TaskRecord {
  std::size_t group = 0;
  std::size_t request = 0;
  std::size_t network = 0;
  std::size_t subgraph = 0;
  std::size_t processor = 0;
  double ready = 0.0;
  double start = 0.0;
  double finish = 0.0;
  double arrival = 0.0;
};

struct RequestRecord {
  std::size_t group = 0;
  std::size_t request = 0;
  std::size_t network = 0;
  double arrival = 0.0;  // T_s
  double finish = 0.0;   // T_f, output delivered to the host
};

// Records ordered by (group, request, network[, subgraph]).
struct Trace {
  std::vector<TaskRecord> tasks;
  std::vector<RequestRecord> requests;
};

// Discrete-event run of `requests` periodic arrivals per group. Every
// processor has an execution lane and a quantization lane, each
// non-preemptive and work-conserving; contention is resolved by (network
// priority, request, subgraph order).
Trace simulate(const Solution& solution, const Workload& workload, const DeviceProfile& profile,
               const SimConfig& config);

// Per group: average and nearest-rank p90 makespan, laid out
// [avg_0, p90_0, avg_1, p90_1, ...].
using ObjectiveVector = std::vector<double>;
ObjectiveVector evaluate_objectives(const Trace& trace, const Workload& workload);

// Noise factor for one execution; exposed for tests.
double noise_factor(const NoiseConfig& noise, double sigma, std::size_t group,
                    std::size_t request, std::size_t network, std::size_t subgraph);

void write_trace_csv(std::ostream& out, const Trace& trace, const Workload& workload,
                     const DeviceProfile& profile);

}  // namespace hetsched
