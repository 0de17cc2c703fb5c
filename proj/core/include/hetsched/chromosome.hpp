#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/simulator.hpp"
#include "hetsched/workload.hpp"

namespace hetsched {

// Genome over a workload. Partition bits follow canonical edge order,
// mapping genes follow layer order, priority lists network indices from
// highest to lowest.
struct Chromosome {
  std::vector<std::vector<std::uint8_t>> partition;
  std::vector<std::vector<std::uint16_t>> mapping;
  std::vector<std::size_t> priority;

  bool operator==(const Chromosome&) const = default;
  auto operator<=>(const Chromosome&) const = default;
};

// Throws ValidationError on a shape mismatch, an out-of-range processor or a
// priority that is not a permutation.
void check_chromosome(const Chromosome& chromosome, const Workload& workload,
                      std::size_t processor_count);

Solution decode(const Chromosome& chromosome, const Workload& workload, const CostModel& cost);

// Genome that decodes to `solution`: cut bits on every edge crossing
// subgraphs, each layer voting for its subgraph's processor.
Chromosome encode(const Solution& solution, const Workload& workload);

// Every network whole, network m on processors[m].
Chromosome unpartitioned(const Workload& workload, const std::vector<std::size_t>& processors,
                         std::vector<std::size_t> priority);

// Per network, the processor with the fastest whole-network best config;
// ties go to the lowest index.
std::vector<std::size_t> fastest_processors(const Workload& workload, const CostModel& cost);

}  // namespace hetsched
