#include "hetsched/workload.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hetsched/error.hpp"

namespace hetsched {

void Scenario::validate() const {
  if (groups.empty()) throw ValidationError("scenario has no model groups");
  std::set<int> ids;
  std::set<std::string> seen;
  for (const auto& g : groups) {
    if (!ids.insert(g.id).second)
      throw ValidationError("duplicate group id " + std::to_string(g.id));
    if (g.networks.empty())
      throw ValidationError("group " + std::to_string(g.id) + " is empty");
    for (const auto& n : g.networks)
      if (!seen.insert(n).second)
        throw ValidationError("network '" + n + "' appears in more than one place");
  }
}

Scenario generate_scenario(const Catalog& catalog, std::size_t n_groups,
                           std::size_t models_per_group, std::uint64_t seed) {
  if (n_groups == 0 || models_per_group == 0)
    throw ValidationError("scenario needs at least one group of one model");
  const auto needed = n_groups * models_per_group;
  if (needed > catalog.entries.size())
    throw ValidationError("catalog '" + catalog.id + "' has " +
                          std::to_string(catalog.entries.size()) + " models, scenario needs " +
                          std::to_string(needed));

  // Fisher-Yates over mt19937_64 output, whose sequence is fixed by the
  // standard, so scenarios agree across standard libraries.
  std::vector<std::size_t> pick(catalog.entries.size());
  std::iota(pick.begin(), pick.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = pick.size() - 1; i > 0; --i) std::swap(pick[i], pick[rng() % (i + 1)]);

  Scenario s;
  s.catalog_ref = catalog.id;
  s.seed = seed;
  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<std::size_t> members(pick.begin() + static_cast<std::ptrdiff_t>(g * models_per_group),
                                     pick.begin() + static_cast<std::ptrdiff_t>((g + 1) * models_per_group));
    std::sort(members.begin(), members.end());
    ModelGroup group{static_cast<int>(g), {}};
    for (auto i : members) group.networks.push_back(catalog.entries[i].graph->name());
    s.groups.push_back(std::move(group));
  }
  return s;
}

Workload::Workload(Scenario scenario,
                   const std::vector<std::shared_ptr<const NetworkGraph>>& pool)
    : scenario_(std::move(scenario)) {
  scenario_.validate();
  for (std::size_t g = 0; g < scenario_.groups.size(); ++g) {
    members_.emplace_back();
    for (const auto& name : scenario_.groups[g].networks) {
      auto it = std::find_if(pool.begin(), pool.end(),
                             [&](const auto& graph) { return graph->name() == name; });
      if (it == pool.end()) throw ValidationError("unknown network '" + name + "'");
      members_.back().push_back(networks_.size());
      networks_.push_back(*it);
      group_of_.push_back(g);
      catalog_rank_.push_back(static_cast<std::size_t>(it - pool.begin()));
    }
  }
}

std::size_t Workload::index_of(const std::string& network) const {
  for (std::size_t m = 0; m < networks_.size(); ++m)
    if (networks_[m]->name() == network) return m;
  throw ValidationError("workload has no network '" + network + "'");
}

std::vector<std::size_t> Workload::catalog_order() const {
  std::vector<std::size_t> order(networks_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return catalog_rank_[a] < catalog_rank_[b]; });
  return order;
}

Workload resolve(const Scenario& scenario, const Catalog& catalog) {
  std::vector<std::shared_ptr<const NetworkGraph>> pool;
  pool.reserve(catalog.entries.size());
  for (const auto& e : catalog.entries) pool.push_back(e.graph);
  return Workload(scenario, pool);
}

}  // namespace hetsched
