#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hetsched/cost.hpp"
#include "hetsched/graph.hpp"
#include "hetsched/workload.hpp"

namespace hetsched::testing {

// Layers 0..n-1 joined in a chain, every edge carrying `tensor_bytes`.
NetworkDescription chain(const std::string& name, std::size_t layers, std::uint64_t tensor_bytes,
                         std::uint64_t input_bytes = 4096, std::uint64_t output_bytes = 4096);

struct LayerTimes {
  std::string network;
  std::vector<double> cpu;  // µs per layer on CPU/ref/fp32
  std::vector<double> npu;  // µs per layer on NPU/htp/fp16
};

// CPU (host, one fp32 config) and NPU (one fp16 config) with default
// non-linearity and communication parameters.
DeviceProfile cpu_npu_profile(const std::vector<LayerTimes>& times);

// Workload with one group per entry of `groups`, networks drawn from `graphs`.
Workload make_workload(const std::vector<std::vector<std::string>>& groups,
                       const std::vector<NetworkDescription>& graphs);

}  // namespace hetsched::testing
