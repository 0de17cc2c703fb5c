#include "hetsched/chromosome.hpp"

#include <limits>
#include <string>

#include "hetsched/error.hpp"

namespace hetsched {

void check_chromosome(const Chromosome& c, const Workload& workload,
                      std::size_t processor_count) {
  const auto n = workload.network_count();
  if (c.partition.size() != n || c.mapping.size() != n)
    throw ValidationError("chromosome covers " + std::to_string(c.partition.size()) +
                          " networks, workload has " + std::to_string(n));
  for (std::size_t m = 0; m < n; ++m) {
    const auto& graph = workload.network(m);
    if (c.partition[m].size() != graph.edge_count())
      throw ValidationError("partition genes of '" + graph.name() + "' do not match its edges");
    if (c.mapping[m].size() != graph.layer_count())
      throw ValidationError("mapping genes of '" + graph.name() + "' do not match its layers");
    for (auto p : c.mapping[m])
      if (p >= processor_count)
        throw ValidationError("mapping gene of '" + graph.name() + "' names processor " +
                              std::to_string(p));
  }
  if (c.priority.size() != n) throw ValidationError("priority genes do not match the networks");
  std::vector<bool> seen(n, false);
  for (auto m : c.priority) {
    if (m >= n || seen[m]) throw ValidationError("priority genes are not a permutation");
    seen[m] = true;
  }
}

Solution decode(const Chromosome& c, const Workload& workload, const CostModel& cost) {
  const auto processors = cost.profile().processors.size();
  check_chromosome(c, workload, processors);
  std::vector<PartitionedNetwork> partitions;
  std::vector<std::vector<std::size_t>> assignment;
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    partitions.push_back(decode_partition(workload.network(m), c.partition[m]));
    assignment.push_back(decode_mapping(partitions.back(), c.mapping[m], processors));
  }
  return build_solution(workload, cost, std::move(partitions), assignment, c.priority);
}

Chromosome encode(const Solution& solution, const Workload& workload) {
  Chromosome c;
  c.priority = solution.priority;
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    const auto& graph = workload.network(m);
    const auto& plan = solution.networks.at(m);
    const auto& sub = plan.partition.subgraph_of;
    std::vector<std::uint8_t> bits;
    for (const auto& e : graph.edges()) bits.push_back(sub[e.src] != sub[e.dst] ? 1 : 0);
    std::vector<std::uint16_t> genes;
    for (std::size_t l = 0; l < graph.layer_count(); ++l)
      genes.push_back(static_cast<std::uint16_t>(plan.processor[sub[l]]));
    c.partition.push_back(std::move(bits));
    c.mapping.push_back(std::move(genes));
  }
  return c;
}

Chromosome unpartitioned(const Workload& workload, const std::vector<std::size_t>& processors,
                         std::vector<std::size_t> priority) {
  Chromosome c;
  c.priority = std::move(priority);
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    const auto& graph = workload.network(m);
    c.partition.emplace_back(graph.edge_count(), 0);
    c.mapping.emplace_back(graph.layer_count(), static_cast<std::uint16_t>(processors.at(m)));
  }
  return c;
}

std::vector<std::size_t> fastest_processors(const Workload& workload, const CostModel& cost) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    std::size_t best = 0;
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < cost.profile().processors.size(); ++p) {
      const double t = cost.model_time(workload.network(m), p);
      if (t < best_t) {
        best_t = t;
        best = p;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace hetsched
