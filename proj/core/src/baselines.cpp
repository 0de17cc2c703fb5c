#include "hetsched/baselines.hpp"

#include <deque>
#include <set>
#include <string>

#include "hetsched/chromosome.hpp"
#include "hetsched/error.hpp"
#include "hetsched/metrics.hpp"

namespace hetsched {

std::string_view to_string(BaselineKind kind) {
  return kind == BaselineKind::npu_only ? "npu-only" : "best-mapping";
}

BaselineKind parse_baseline(std::string_view text) {
  if (text == "npu-only") return BaselineKind::npu_only;
  if (text == "best-mapping") return BaselineKind::best_mapping;
  throw ValidationError("unknown baseline '" + std::string(text) +
                        "' (expected npu-only or best-mapping)");
}

Solution npu_only(const Workload& workload, const CostModel& cost) {
  if (!cost.profile().has_processor("NPU"))
    throw ValidationError("the NPU Only baseline needs a processor named NPU");
  std::vector<std::size_t> npu(workload.network_count(), cost.profile().processor_index("NPU"));
  return decode(unpartitioned(workload, npu, workload.catalog_order()), workload, cost);
}

std::vector<Candidate> best_mapping(const Workload& workload, const CostModel& cost,
                                    const Evaluator& evaluator) {
  const auto processors = cost.profile().processors.size();
  const auto priority = workload.catalog_order();
  auto make = [&](const std::vector<std::size_t>& assignment) {
    Candidate c;
    c.chromosome = unpartitioned(workload, assignment, priority);
    c.solution = decode(c.chromosome, workload, cost);
    c.objectives = evaluator.evaluate(c.solution, 0);
    return c;
  };

  ParetoArchive archive;
  const auto start = fastest_processors(workload, cost);
  std::set<std::vector<std::size_t>> visited{start};
  std::deque<std::vector<std::size_t>> frontier{start};
  archive.insert(make(start));
  while (!frontier.empty()) {
    const auto current = frontier.front();
    frontier.pop_front();
    for (std::size_t m = 0; m < current.size(); ++m) {
      for (std::size_t p = 0; p < processors; ++p) {
        if (p == current[m]) continue;
        auto next = current;
        next[m] = p;
        if (!visited.insert(next).second) continue;
        if (archive.insert(make(next))) frontier.push_back(std::move(next));
      }
    }
  }
  return archive.sorted();
}

std::vector<Candidate> best_mapping(const Workload& workload, const CostModel& cost,
                                    double alpha_search, std::size_t requests) {
  SimConfig sim;
  sim.requests = requests;
  sim.period_us = periods(alpha_search, base_periods(workload, cost));
  SimulationEvaluator evaluator(workload, cost.profile(), sim);
  return best_mapping(workload, cost, evaluator);
}

}  // namespace hetsched
