#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/merkle.hpp"
#include "hetsched/profile_db.hpp"

namespace hetsched {

enum class DType { fp32, fp16, int8 };

std::string_view to_string(DType dtype);
DType parse_dtype(std::string_view text);

struct ProcessorConfig {
  std::size_t processor = 0;  // index into DeviceProfile::processors
  std::string backend;
  DType dtype = DType::fp32;
};

// t = launch + n * dispatch + rho(n) * sum(layer times),
// rho(n) = rho_inf + (1 - rho_inf) / n.
struct NonLinearityParams {
  double launch_us = 0.0;
  double dispatch_us = 0.0;
  double rho_inf = 1.0;
};

struct RpcLine {
  double slope_us_per_mib = 0.0;
  double intercept_us = 0.0;
  double at(double mib) const { return slope_us_per_mib * mib + intercept_us; }
};

struct CommCostParams {
  double bandwidth_bytes_per_s = 40e9;
  RpcLine rpc_small{40.0, 30.0};  // size < 1 MiB
  RpcLine rpc_large{25.0, 45.0};  // size >= 1 MiB
};

inline constexpr double kMiB = 1024.0 * 1024.0;

// RPC overhead plus transfer at memory bandwidth; zero between identical
// endpoints.
double comm_cost(std::uint64_t bytes, std::size_t src, std::size_t dst,
                 const CommCostParams& params);

double contraction(const NonLinearityParams& params, std::size_t layer_count);
double synthetic_time(const NonLinearityParams& params, std::size_t layer_count,
                      double layer_time_sum_us);

struct DeviceProfile {
  std::vector<std::string> processors;
  std::size_t host = 0;  // endpoint of client input/output
  std::vector<ProcessorConfig> configs;
  std::vector<NonLinearityParams> nonlin;  // per processor
  CommCostParams comm;
  double quant_throughput_bytes_per_us = 5000.0;
  // network -> config -> per-layer time (µs). An empty vector means the
  // network cannot run with that config.
  std::map<std::string, std::vector<std::vector<double>>> layer_costs;

  std::size_t processor_index(std::string_view name) const;  // throws if absent
  bool has_processor(std::string_view name) const;
  std::string config_key(std::size_t config) const;          // "CPU/xnnpack/fp32"
  std::vector<std::size_t> configs_of(std::size_t processor) const;

  // Throws ValidationError when invariants are broken (non-positive times,
  // bad rho, negative slopes, shape mismatches).
  void validate() const;
  // Every layer of `graph` priced for every config it supports, and at least
  // one config per processor.
  void validate_network(const NetworkGraph& graph) const;
};

NonLinearityParams default_nonlinearity(std::string_view processor);

// Source of subgraph execution times. The synthetic provider applies the
// non-linear model to per-layer costs; a device-backed provider can replace it.
class ProfileProvider {
 public:
  virtual ~ProfileProvider() = default;
  virtual double measure(const NetworkGraph& graph, const Subgraph& subgraph,
                         std::size_t config) const = 0;
  virtual bool supports(const NetworkGraph&, std::size_t) const { return true; }
};

class SyntheticProfileProvider final : public ProfileProvider {
 public:
  explicit SyntheticProfileProvider(std::shared_ptr<const DeviceProfile> profile);
  // Throws ValidationError when a layer cost is missing.
  double measure(const NetworkGraph& graph, const Subgraph& subgraph,
                 std::size_t config) const override;
  bool supports(const NetworkGraph& graph, std::size_t config) const override;

 private:
  std::shared_ptr<const DeviceProfile> profile_;
};

// Profile lookups through the content-addressed cache.
class CostModel {
 public:
  explicit CostModel(std::shared_ptr<const DeviceProfile> profile,
                     std::shared_ptr<ProfileDB> db = std::make_shared<ProfileDB>(),
                     std::shared_ptr<const ProfileProvider> provider = nullptr);

  const DeviceProfile& profile() const { return *profile_; }
  std::shared_ptr<const DeviceProfile> profile_ptr() const { return profile_; }
  ProfileDB& db() const { return *db_; }

  double subgraph_time(const NetworkGraph& graph, const Subgraph& subgraph,
                       std::size_t config) const;
  double subgraph_time(const NetworkGraph& graph, const Subgraph& subgraph,
                       const Digest& digest, std::size_t config) const;

  struct Choice {
    std::size_t config = 0;
    double time_us = 0.0;
  };
  // Fastest supported config on `processor`; ties keep enumeration order.
  Choice best_config(const NetworkGraph& graph, const Subgraph& subgraph,
                     std::size_t processor) const;
  Choice best_config(const NetworkGraph& graph, const Subgraph& subgraph,
                     const Digest& digest, std::size_t processor) const;

  // Whole-network time on the processor's best config.
  double model_time(const NetworkGraph& graph, std::size_t processor) const;

  double comm_cost(std::uint64_t bytes, std::size_t src, std::size_t dst) const {
    return hetsched::comm_cost(bytes, src, dst, profile_->comm);
  }

 private:
  std::shared_ptr<const DeviceProfile> profile_;
  std::shared_ptr<ProfileDB> db_;
  std::shared_ptr<const ProfileProvider> provider_;
};

Subgraph whole_network(const NetworkGraph& graph);

}  // namespace hetsched
