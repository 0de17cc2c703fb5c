#include <map>
#include <set>
#include <utility>

#include "hetsched/optimizer.hpp"

namespace hetsched {

namespace {

// True when both labelings induce the same grouping of layers.
bool same_grouping(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fresh_x] = ab.emplace(a[i], b[i]);
    auto [y, fresh_y] = ba.emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

std::set<std::pair<std::size_t, std::size_t>> quotient_pairs(const NetworkGraph& graph,
                                                              const PartitionedNetwork& pn) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : graph.edges()) {
    auto a = pn.subgraph_of[e.src], b = pn.subgraph_of[e.dst];
    if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
  }
  return pairs;
}

// Replaces `current` with the trial when it Pareto-improves on it.
bool try_accept(Candidate& current, Chromosome trial, const Workload& workload,
                const CostModel& cost, const Evaluator& fast) {
  auto solution = decode(trial, workload, cost);
  auto objectives = fast.evaluate(solution, 0);
  if (!dominates(objectives, current.objectives)) return false;
  current = {std::move(trial), std::move(solution), std::move(objectives)};
  return true;
}

bool merge_step(Candidate& c, const Workload& workload, const CostModel& cost,
                const Evaluator& fast) {
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    const auto& graph = workload.network(m);
    const auto& pn = c.solution.networks[m].partition;
    for (auto [a, b] : quotient_pairs(graph, pn)) {
      Chromosome trial = c.chromosome;
      for (std::size_t e = 0; e < graph.edge_count(); ++e) {
        auto x = pn.subgraph_of[graph.edges()[e].src], y = pn.subgraph_of[graph.edges()[e].dst];
        if ((x == a && y == b) || (x == b && y == a)) trial.partition[m][e] = 0;
      }
      if (try_accept(c, std::move(trial), workload, cost, fast)) return true;
    }
  }
  return false;
}

bool reposition_step(Candidate& c, const Workload& workload, const CostModel& cost,
                     const Evaluator& fast) {
  const auto processors = cost.profile().processors.size();
  for (std::size_t m = 0; m < workload.network_count(); ++m) {
    const auto& graph = workload.network(m);
    const auto& plan = c.solution.networks[m];
    const auto& sub = plan.partition.subgraph_of;
    for (const auto& edge : graph.edges()) {
      const auto a = sub[edge.src], b = sub[edge.dst];
      if (a == b) continue;
      for (auto [layer, from, to] : {std::tuple{edge.src, a, b}, std::tuple{edge.dst, b, a}}) {
        if (plan.partition.subgraphs[from].layers.size() == 1) continue;
        auto intended = sub;
        intended[layer] = to;
        Chromosome trial = c.chromosome;
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
          const auto& ge = graph.edges()[e];
          if (ge.src == layer || ge.dst == layer)
            trial.partition[m][e] = intended[ge.src] != intended[ge.dst] ? 1 : 0;
        }
        trial.mapping[m][layer] = static_cast<std::uint16_t>(plan.processor[to]);

        auto pn = decode_partition(graph, trial.partition[m]);
        if (!same_grouping(pn.subgraph_of, intended)) continue;
        auto assigned = decode_mapping(pn, trial.mapping[m], processors);
        bool kept = true;
        for (std::size_t l = 0; l < graph.layer_count() && kept; ++l)
          kept = assigned[pn.subgraph_of[l]] == plan.processor[intended[l]];
        if (!kept) continue;
        if (try_accept(c, std::move(trial), workload, cost, fast)) return true;
      }
    }
  }
  return false;
}

}  // namespace

Candidate local_search_merge(Candidate candidate, const Workload& workload, const CostModel& cost,
                             const Evaluator& fast) {
  while (merge_step(candidate, workload, cost, fast)) {
  }
  return candidate;
}

Candidate local_search_reposition(Candidate candidate, const Workload& workload,
                                  const CostModel& cost, const Evaluator& fast) {
  while (reposition_step(candidate, workload, cost, fast)) {
  }
  return candidate;
}

}  // namespace hetsched
