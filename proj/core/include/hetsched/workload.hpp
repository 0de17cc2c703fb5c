#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hetsched/catalog.hpp"
#include "hetsched/graph.hpp"

namespace hetsched {

// Networks fed by one shared periodic input source.
struct ModelGroup {
  int id = 0;
  std::vector<std::string> networks;
};

struct Scenario {
  std::vector<ModelGroup> groups;
  std::string catalog_ref;
  std::uint64_t seed = 0;

  // Throws ValidationError on an empty scenario, an empty group, duplicate
  // group ids or a network listed twice.
  void validate() const;
};

// Samples n_groups * models_per_group distinct catalog entries. Networks in a
// group keep catalog order.
Scenario generate_scenario(const Catalog& catalog, std::size_t n_groups,
                           std::size_t models_per_group, std::uint64_t seed);

// Scenario bound to network graphs. Networks are numbered group by group in
// scenario order; that index is used by solutions, chromosomes and traces.
class Workload {
 public:
  // `pool` supplies graphs by name; catalog_rank() is a network's position in it.
  Workload(Scenario scenario, const std::vector<std::shared_ptr<const NetworkGraph>>& pool);

  const Scenario& scenario() const { return scenario_; }
  std::size_t network_count() const { return networks_.size(); }
  std::size_t group_count() const { return members_.size(); }
  const NetworkGraph& network(std::size_t m) const { return *networks_[m]; }
  const std::shared_ptr<const NetworkGraph>& network_ptr(std::size_t m) const { return networks_[m]; }
  std::size_t group_of(std::size_t m) const { return group_of_[m]; }
  const std::vector<std::size_t>& members(std::size_t g) const { return members_[g]; }
  std::size_t catalog_rank(std::size_t m) const { return catalog_rank_[m]; }
  std::size_t index_of(const std::string& network) const;  // throws if absent

  // Network indices sorted by catalog rank.
  std::vector<std::size_t> catalog_order() const;

 private:
  Scenario scenario_;
  std::vector<std::shared_ptr<const NetworkGraph>> networks_;
  std::vector<std::size_t> group_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> catalog_rank_;
};

Workload resolve(const Scenario& scenario, const Catalog& catalog);

}  // namespace hetsched
