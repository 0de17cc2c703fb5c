#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hetsched {

struct Layer {
  std::int64_t id = 0;
  std::string op_kind;
  std::uint64_t param_bytes = 0;
  std::uint64_t mac_count = 0;
};

// Edge as written in a network file: endpoints are layer ids.
struct EdgeDescription {
  std::int64_t src_layer = 0;
  std::int64_t dst_layer = 0;
  std::uint64_t tensor_bytes = 0;
};

// Unvalidated network as read from disk. `input_bytes` is delivered from the
// host to every source layer, `output_bytes` is returned to the host by every
// sink layer.
struct NetworkDescription {
  std::string name;
  std::vector<Layer> layers;
  std::vector<EdgeDescription> edges;
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Reports self-loops, duplicate ids, dangling edges, duplicate edges,
// zero-sized tensors, cycles and disconnected graphs.
ValidationReport validate_network(const NetworkDescription& description);

// Edge between layer positions (indices into NetworkGraph::layers()).
struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::uint64_t tensor_bytes = 0;
};

// Validated, immutable network. Edges are kept in canonical (src id, dst id)
// order; that order is the gene order of partition chromosomes.
class NetworkGraph {
 public:
  // Throws ValidationError listing every violation.
  explicit NetworkGraph(NetworkDescription description);

  const std::string& name() const { return name_; }
  std::span<const Layer> layers() const { return layers_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t input_bytes() const { return input_bytes_; }
  std::uint64_t output_bytes() const { return output_bytes_; }

  std::span<const std::size_t> in_edges(std::size_t layer) const { return in_edges_[layer]; }
  std::span<const std::size_t> out_edges(std::size_t layer) const { return out_edges_[layer]; }
  bool is_source(std::size_t layer) const { return in_edges_[layer].empty(); }
  bool is_sink(std::size_t layer) const { return out_edges_[layer].empty(); }

  // Layer positions in a fixed topological order (Kahn, smallest position first).
  std::span<const std::size_t> topological_order() const { return topo_; }
  std::size_t index_of(std::int64_t layer_id) const;

  NetworkDescription description() const;

 private:
  std::string name_;
  std::vector<Layer> layers_;
  std::vector<Edge> edges_;
  std::uint64_t input_bytes_ = 0;
  std::uint64_t output_bytes_ = 0;
  std::vector<std::vector<std::size_t>> in_edges_;
  std::vector<std::vector<std::size_t>> out_edges_;
  std::vector<std::size_t> topo_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

inline constexpr std::size_t kHost = std::numeric_limits<std::size_t>::max();

// One data dependency crossing a subgraph boundary. `edge` is empty for the
// network input/output exchanged with the host; `peer` is the producing (for
// inputs) or consuming (for outputs) subgraph index, or kHost.
struct BoundaryPort {
  std::optional<std::size_t> edge;
  std::size_t peer = kHost;
  bool operator==(const BoundaryPort&) const = default;
};

struct Subgraph {
  std::vector<std::size_t> layers;  // ascending layer positions
  std::vector<BoundaryPort> boundary_in;
  std::vector<BoundaryPort> boundary_out;
  bool operator==(const Subgraph&) const = default;
};

struct QuotientInput {
  std::size_t producer = 0;
  std::uint64_t bytes = 0;  // summed over all cut edges from producer
};

struct PartitionedNetwork {
  std::string network;
  std::vector<Subgraph> subgraphs;        // topological order
  std::vector<std::size_t> subgraph_of;   // per layer position

  // Inputs from other subgraphs, grouped per producer in ascending order.
  std::vector<QuotientInput> inputs_of(std::size_t subgraph, const NetworkGraph& graph) const;
  bool takes_host_input(std::size_t subgraph) const;
  bool sends_host_output(std::size_t subgraph) const;
};

// Subgraphs are the weakly connected components left after removing cut
// edges; components lying on a quotient cycle are merged until the quotient
// graph is acyclic. Throws ValidationError on a length mismatch.
PartitionedNetwork decode_partition(const NetworkGraph& graph,
                                    std::span<const std::uint8_t> cut_bits);

// Majority vote of per-layer processor preferences; ties go to the lowest
// processor index.
std::vector<std::size_t> decode_mapping(const PartitionedNetwork& partition,
                                        std::span<const std::uint16_t> layer_prefs,
                                        std::size_t processor_count);

}  // namespace hetsched
