#include "hetsched/catalog.hpp"

#include <array>
#include <numeric>
#include <optional>

#include "hetsched/error.hpp"

namespace hetsched {

const CatalogEntry& Catalog::at(const std::string& network) const {
  return entries.at(index_of(network));
}

std::size_t Catalog::index_of(const std::string& network) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].graph->name() == network) return i;
  throw ValidationError("catalog '" + id + "' has no network '" + network + "'");
}

namespace {

struct ModelRow {
  const char* name;
  std::size_t layers;
  double mmacs;    // millions
  double mparams;  // millions
  std::uint64_t input_bytes;
  std::uint64_t output_bytes;
  // ms; CPU: ORT default fp32/fp16, XNNPACK fp32/fp16, NNAPI fp32/fp16
  std::array<std::optional<double>, 6> cpu;
  double gpu;
  double npu;
};

constexpr std::uint64_t kImage = 3 * 4;  // 3 channels, fp32

// clang-format off
const ModelRow kModels[] = {
  {"mediapipe_face_detection",      8,    39.2,  0.6, 128 * 128 * kImage,   896 * 16 * 4,
   {2.6, 6.0, 1.6, 5.5, 201.0, 208.5},           1.9,   0.3},
  {"mediapipe_selfie_segmentation", 10,   72.3,  0.1, 256 * 256 * kImage,   256 * 256 * 4,
   {4.3, 3.5, 3.1, 3.6, 106.8, 110.2},           6.5,   1.0},
  {"mediapipe_hand_detection",      12,  410.8,  2.0, 192 * 192 * kImage,   2016 * 18 * 4,
   {24.3, 5.8, 8.5, 7.9, 198.5, 205.1},          4.9,   1.2},
  {"mediapipe_pose_detection",      12,  444.2,  3.4, 224 * 224 * kImage,   2254 * 12 * 4,
   {16.3, 6.1, 8.7, 8.0, 286.0, 287.7},          4.9,   1.1},
  {"tc_monodepth",                  14, 2313.2,  0.2, 320 * 256 * kImage,   320 * 256 * 4,
   {93.8, 73.2, std::nullopt, std::nullopt, std::nullopt, std::nullopt}, 31.7, 32.4},
  {"fast_scnn",                     14, 2358.9,  1.1, 1024 * 512 * kImage,  1024 * 512 * 4,
   {73.2, 37.3, std::nullopt, std::nullopt, std::nullopt, std::nullopt}, 12.9, 22.0},
  {"yolov8_nano",                   16, 4891.3,  3.2, 640 * 640 * kImage,   8400 * 84 * 4,
   {73.0, 58.6, 74.5, 61.6, 638.7, 642.9},       16.0,  5.3},
  {"mosaic_segmentation",           16, 22055.1, 1.8, 1024 * 512 * kImage,  1024 * 512 * 4,
   {582.5, 252.6, 373.7, 213.0, 1211.7, 1208.4}, 83.8, 163.9},
  {"fastsam_small",                 16, 22325.1, 11.8, 640 * 640 * kImage,  8400 * 37 * 4,
   {314.6, 220.3, 297.4, 192.4, 1255.8, 1256.8}, 43.4,  9.1},
};
// clang-format on

constexpr const char* kCpuKeys[6] = {
    "CPU/ort-cpu/fp32", "CPU/ort-cpu/fp16", "CPU/xnnpack/fp32",
    "CPU/xnnpack/fp16", "CPU/nnapi/fp32",   "CPU/nnapi/fp16",
};

bool is_skip_source(std::size_t layer, std::size_t count) {
  return layer % 5 == 1 && layer + 2 < count;
}

NetworkDescription synthesize(const ModelRow& row) {
  static constexpr const char* kOps[] = {"conv2d", "depthwise_conv2d", "conv2d", "relu6"};
  NetworkDescription d;
  d.name = row.name;
  d.input_bytes = row.input_bytes;
  d.output_bytes = row.output_bytes;

  const auto n = row.layers;
  std::vector<double> mac_w(n), param_w(n);
  for (std::size_t l = 0; l < n; ++l) {
    mac_w[l] = 2.0 + static_cast<double>((l * 5 + 3) % 7);
    param_w[l] = 1.0 + static_cast<double>((l * 3 + 1) % 5);
  }
  const double mac_total = std::accumulate(mac_w.begin(), mac_w.end(), 0.0);
  const double param_total = std::accumulate(param_w.begin(), param_w.end(), 0.0);

  for (std::size_t l = 0; l < n; ++l) {
    const bool joins_skip = l >= 3 && is_skip_source(l - 2, n);
    Layer layer;
    layer.id = static_cast<std::int64_t>(l);
    layer.op_kind = joins_skip ? "add" : kOps[l % 4];
    layer.mac_count = static_cast<std::uint64_t>(row.mmacs * 1e6 * mac_w[l] / mac_total);
    // fp16 weights
    layer.param_bytes = static_cast<std::uint64_t>(row.mparams * 1e6 * 2.0 * param_w[l] / param_total);
    d.layers.push_back(std::move(layer));
  }

  auto activation = [&](std::size_t l) {
    const double scaled = static_cast<double>(row.input_bytes) / (1.0 + static_cast<double>(l) / 3.0);
    return std::max<std::uint64_t>(4096, static_cast<std::uint64_t>(scaled) / 64 * 64);
  };
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const auto id = static_cast<std::int64_t>(l);
    d.edges.push_back({id, id + 1, activation(l)});
    if (is_skip_source(l, n)) d.edges.push_back({id, id + 2, activation(l)});
  }
  return d;
}

}  // namespace

Catalog builtin_catalog() {
  Catalog catalog;
  catalog.id = "mobile-vision-9";
  for (const auto& row : kModels) {
    CatalogEntry entry;
    entry.graph = std::make_shared<const NetworkGraph>(synthesize(row));
    for (std::size_t i = 0; i < row.cpu.size(); ++i)
      if (row.cpu[i]) entry.seed_costs_us[kCpuKeys[i]] = *row.cpu[i] * 1000.0;
    entry.seed_costs_us["GPU/qnn-gpu/fp16"] = row.gpu * 1000.0;
    entry.seed_costs_us["NPU/qnn-htp/fp16"] = row.npu * 1000.0;
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

DeviceProfile default_device() {
  DeviceProfile device;
  device.processors = {"CPU", "GPU", "NPU"};
  device.host = 0;
  for (const char* backend : {"ort-cpu", "xnnpack", "nnapi"})
    for (DType dtype : {DType::fp32, DType::fp16})
      device.configs.push_back({0, backend, dtype});
  device.configs.push_back({1, "qnn-gpu", DType::fp16});
  device.configs.push_back({2, "qnn-htp", DType::fp16});
  for (const auto& p : device.processors) device.nonlin.push_back(default_nonlinearity(p));
  return device;
}

DeviceProfile derive_profile(const Catalog& catalog, DeviceProfile device) {
  device.layer_costs.clear();
  for (const auto& entry : catalog.entries) {
    const auto& graph = *entry.graph;
    const auto n = graph.layer_count();
    double mac_total = 0.0;
    for (const auto& layer : graph.layers()) mac_total += static_cast<double>(layer.mac_count);

    std::vector<std::vector<double>> per_config(device.configs.size());
    for (std::size_t c = 0; c < device.configs.size(); ++c) {
      auto seed = entry.seed_costs_us.find(device.config_key(c));
      if (seed == entry.seed_costs_us.end()) continue;
      const auto& params = device.nonlin.at(device.configs[c].processor);
      const double overhead = params.launch_us + static_cast<double>(n) * params.dispatch_us;
      const double sum = (seed->second - overhead) / contraction(params, n);
      if (!(sum > 0.0))
        throw ValidationError("seed cost of '" + graph.name() + "' on " + device.config_key(c) +
                              " does not cover launch and dispatch overhead");
      auto& times = per_config[c];
      times.reserve(n);
      for (const auto& layer : graph.layers()) {
        const double share = mac_total > 0.0 ? static_cast<double>(layer.mac_count) / mac_total
                                             : 1.0 / static_cast<double>(n);
        times.push_back(sum * share);
      }
    }
    device.layer_costs[graph.name()] = std::move(per_config);
  }
  device.validate();
  return device;
}

}  // namespace hetsched
