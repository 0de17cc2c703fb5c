#include "hetsched/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetsched/error.hpp"

namespace hetsched {

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::fp32: return "fp32";
    case DType::fp16: return "fp16";
    case DType::int8: return "int8";
  }
  return "?";
}

DType parse_dtype(std::string_view text) {
  if (text == "fp32") return DType::fp32;
  if (text == "fp16") return DType::fp16;
  if (text == "int8") return DType::int8;
  throw ValidationError("unknown dtype '" + std::string(text) + "'");
}

double comm_cost(std::uint64_t bytes, std::size_t src, std::size_t dst,
                 const CommCostParams& params) {
  if (src == dst) return 0.0;
  const double mib = static_cast<double>(bytes) / kMiB;
  const double rpc = mib < 1.0 ? params.rpc_small.at(mib) : params.rpc_large.at(mib);
  const double transfer_us = static_cast<double>(bytes) / params.bandwidth_bytes_per_s * 1e6;
  return rpc + transfer_us;
}

double contraction(const NonLinearityParams& p, std::size_t n) {
  return p.rho_inf + (1.0 - p.rho_inf) / static_cast<double>(n);
}

double synthetic_time(const NonLinearityParams& p, std::size_t n, double sum_us) {
  return p.launch_us + static_cast<double>(n) * p.dispatch_us + contraction(p, n) * sum_us;
}

NonLinearityParams default_nonlinearity(std::string_view processor) {
  if (processor == "GPU") return {300.0, 10.0, 0.95};
  if (processor == "NPU") return {200.0, 0.0, 0.30};
  return {0.0, 0.0, 1.0};
}

std::size_t DeviceProfile::processor_index(std::string_view name) const {
  auto it = std::find(processors.begin(), processors.end(), name);
  if (it == processors.end())
    throw ValidationError("device profile has no processor '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - processors.begin());
}

bool DeviceProfile::has_processor(std::string_view name) const {
  return std::find(processors.begin(), processors.end(), name) != processors.end();
}

std::string DeviceProfile::config_key(std::size_t config) const {
  const auto& c = configs.at(config);
  return processors.at(c.processor) + "/" + c.backend + "/" + std::string(to_string(c.dtype));
}

std::vector<std::size_t> DeviceProfile::configs_of(std::size_t processor) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < configs.size(); ++i)
    if (configs[i].processor == processor) out.push_back(i);
  return out;
}

void DeviceProfile::validate() const {
  if (processors.empty()) throw ValidationError("device profile lists no processors");
  if (host >= processors.size()) throw ValidationError("host processor index out of range");
  if (nonlin.size() != processors.size())
    throw ValidationError("non-linearity parameters must be given for every processor");
  for (std::size_t p = 0; p < nonlin.size(); ++p) {
    const auto& n = nonlin[p];
    if (n.launch_us < 0 || n.dispatch_us < 0 || !(n.rho_inf > 0.0 && n.rho_inf <= 1.0))
      throw ValidationError("invalid non-linearity parameters for " + processors[p]);
  }
  if (!(comm.bandwidth_bytes_per_s > 0))
    throw ValidationError("bandwidth must be positive");
  if (comm.rpc_small.slope_us_per_mib < 0 || comm.rpc_large.slope_us_per_mib < 0)
    throw ValidationError("RPC slopes must be non-negative");
  if (!(quant_throughput_bytes_per_us > 0))
    throw ValidationError("quantization throughput must be positive");
  for (std::size_t c = 0; c < configs.size(); ++c) {
    if (configs[c].processor >= processors.size())
      throw ValidationError("config " + std::to_string(c) + " references unknown processor");
    for (std::size_t d = 0; d < c; ++d)
      if (config_key(c) == config_key(d))
        throw ValidationError("duplicate config " + config_key(c));
  }
  for (const auto& [network, per_config] : layer_costs) {
    if (per_config.size() != configs.size())
      throw ValidationError("layer costs of '" + network + "' must list every config");
    for (const auto& times : per_config)
      for (double t : times)
        if (!(t > 0.0) || !std::isfinite(t))
          throw ValidationError("layer costs of '" + network + "' must be positive");
  }
}

void DeviceProfile::validate_network(const NetworkGraph& graph) const {
  auto it = layer_costs.find(graph.name());
  if (it == layer_costs.end())
    throw ValidationError("device profile has no layer costs for '" + graph.name() + "'");
  std::vector<bool> priced(processors.size(), false);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& times = it->second.at(c);
    if (times.empty()) continue;
    if (times.size() != graph.layer_count())
      throw ValidationError("layer costs of '" + graph.name() + "' for " + config_key(c) +
                            " do not cover every layer");
    priced[configs[c].processor] = true;
  }
  for (std::size_t p = 0; p < processors.size(); ++p)
    if (!priced[p])
      throw ValidationError("'" + graph.name() + "' has no config on " + processors[p]);
}

SyntheticProfileProvider::SyntheticProfileProvider(std::shared_ptr<const DeviceProfile> profile)
    : profile_(std::move(profile)) {}

bool SyntheticProfileProvider::supports(const NetworkGraph& graph, std::size_t config) const {
  auto it = profile_->layer_costs.find(graph.name());
  return it != profile_->layer_costs.end() && config < it->second.size() &&
         it->second[config].size() == graph.layer_count();
}

double SyntheticProfileProvider::measure(const NetworkGraph& graph, const Subgraph& subgraph,
                                         std::size_t config) const {
  if (!supports(graph, config))
    throw ValidationError("missing layer cost for '" + graph.name() + "' on " +
                          profile_->config_key(config));
  const auto& times = profile_->layer_costs.at(graph.name())[config];
  double sum = 0.0;
  for (auto l : subgraph.layers) sum += times[l];
  const auto& params = profile_->nonlin.at(profile_->configs[config].processor);
  return synthetic_time(params, subgraph.layers.size(), sum);
}

CostModel::CostModel(std::shared_ptr<const DeviceProfile> profile, std::shared_ptr<ProfileDB> db,
                     std::shared_ptr<const ProfileProvider> provider)
    : profile_(std::move(profile)), db_(std::move(db)), provider_(std::move(provider)) {
  if (!profile_) throw ValidationError("cost model needs a device profile");
  profile_->validate();
  if (!db_) db_ = std::make_shared<ProfileDB>();
  if (!provider_) provider_ = std::make_shared<SyntheticProfileProvider>(profile_);
}

double CostModel::subgraph_time(const NetworkGraph& graph, const Subgraph& subgraph,
                                std::size_t config) const {
  return subgraph_time(graph, subgraph, subgraph_hash(subgraph, graph), config);
}

double CostModel::subgraph_time(const NetworkGraph& graph, const Subgraph& subgraph,
                                const Digest& digest, std::size_t config) const {
  const auto key = profile_->config_key(config);
  if (auto cached = db_->get(digest, key)) return *cached;
  const double t = provider_->measure(graph, subgraph, config);
  db_->put(digest, key, t);
  return t;
}

CostModel::Choice CostModel::best_config(const NetworkGraph& graph, const Subgraph& subgraph,
                                         std::size_t processor) const {
  return best_config(graph, subgraph, subgraph_hash(subgraph, graph), processor);
}

CostModel::Choice CostModel::best_config(const NetworkGraph& graph, const Subgraph& subgraph,
                                         const Digest& digest, std::size_t processor) const {
  std::optional<Choice> best;
  for (auto c : profile_->configs_of(processor)) {
    if (!provider_->supports(graph, c)) continue;
    const double t = subgraph_time(graph, subgraph, digest, c);
    if (!best || t < best->time_us) best = Choice{c, t};
  }
  if (!best)
    throw ValidationError("no config for '" + graph.name() + "' on processor " +
                          profile_->processors.at(processor));
  return *best;
}

double CostModel::model_time(const NetworkGraph& graph, std::size_t processor) const {
  return best_config(graph, whole_network(graph), processor).time_us;
}

Subgraph whole_network(const NetworkGraph& graph) {
  std::vector<std::uint8_t> none(graph.edge_count(), 0);
  return decode_partition(graph, none).subgraphs.front();
}

}  // namespace hetsched
