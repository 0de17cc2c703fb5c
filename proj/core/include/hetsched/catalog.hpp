#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/graph.hpp"

namespace hetsched {

struct CatalogEntry {
  std::shared_ptr<const NetworkGraph> graph;
  // Whole-model measured time per config key ("NPU/qnn-htp/fp16"), µs.
  std::map<std::string, double> seed_costs_us;
};

struct Catalog {
  std::string id;
  std::vector<CatalogEntry> entries;

  const CatalogEntry& at(const std::string& network) const;  // throws if absent
  std::size_t index_of(const std::string& network) const;
};

// Nine mobile vision models with whole-model times per processor/backend/
// dtype, laid out as synthetic chain DAGs with a skip edge every five layers.
Catalog builtin_catalog();

// Device skeleton (processors, configs, non-linearity, communication) used
// with the builtin catalog: CPU with three backends in fp32/fp16, GPU and NPU
// in fp16.
DeviceProfile default_device();

// Distributes each whole-model seed cost over the model's layers in
// proportion to MAC count, inverting the non-linear model so that the
// unpartitioned network reproduces the seed cost exactly. Configs missing
// from an entry's seed costs are left unsupported.
DeviceProfile derive_profile(const Catalog& catalog, DeviceProfile device);

}  // namespace hetsched
