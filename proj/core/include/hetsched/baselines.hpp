#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/optimizer.hpp"
#include "hetsched/simulator.hpp"
#include "hetsched/workload.hpp"

namespace hetsched {

enum class BaselineKind { npu_only, best_mapping };

std::string_view to_string(BaselineKind kind);
// "npu-only" or "best-mapping"; throws ValidationError otherwise.
BaselineKind parse_baseline(std::string_view text);

// Every network whole on the NPU, catalog-order priority.
// Throws ValidationError when the device has no NPU.
Solution npu_only(const Workload& workload, const CostModel& cost);

// Pareto local search over whole-network processor assignments. Starts from
// every network on its fastest processor; neighbours move one network to
// another processor; every assignment entering the archive is expanded in
// turn. Priority stays in catalog order. Returns the archive ordered by
// objective vector.
std::vector<Candidate> best_mapping(const Workload& workload, const CostModel& cost,
                                    const Evaluator& evaluator);
// Noiseless simulation at periods α_search·Φ̄.
std::vector<Candidate> best_mapping(const Workload& workload, const CostModel& cost,
                                    double alpha_search, std::size_t requests = 20);

}  // namespace hetsched
