#include "fixtures.hpp"

namespace hetsched::testing {

NetworkDescription chain(const std::string& name, std::size_t layers, std::uint64_t tensor_bytes,
                         std::uint64_t input_bytes, std::uint64_t output_bytes) {
  NetworkDescription d;
  d.name = name;
  d.input_bytes = input_bytes;
  d.output_bytes = output_bytes;
  for (std::size_t l = 0; l < layers; ++l)
    d.layers.push_back({static_cast<std::int64_t>(l), "conv2d", 1024, 1000});
  for (std::size_t l = 0; l + 1 < layers; ++l)
    d.edges.push_back({static_cast<std::int64_t>(l), static_cast<std::int64_t>(l + 1), tensor_bytes});
  return d;
}

DeviceProfile cpu_npu_profile(const std::vector<LayerTimes>& times) {
  DeviceProfile p;
  p.processors = {"CPU", "NPU"};
  p.host = 0;
  p.configs = {{0, "ref", DType::fp32}, {1, "htp", DType::fp16}};
  p.nonlin = {default_nonlinearity("CPU"), default_nonlinearity("NPU")};
  for (const auto& t : times) p.layer_costs[t.network] = {t.cpu, t.npu};
  p.validate();
  return p;
}

Workload make_workload(const std::vector<std::vector<std::string>>& groups,
                       const std::vector<NetworkDescription>& graphs) {
  Scenario s;
  s.catalog_ref = "test";
  for (std::size_t g = 0; g < groups.size(); ++g) s.groups.push_back({static_cast<int>(g), groups[g]});
  std::vector<std::shared_ptr<const NetworkGraph>> pool;
  for (const auto& d : graphs) pool.push_back(std::make_shared<const NetworkGraph>(d));
  return Workload(s, pool);
}

}  // namespace hetsched::testing
