#include "hetsched/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "hetsched/error.hpp"

namespace hetsched {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // the smallest member stays the representative
  }
  std::vector<std::size_t> parent;
};

// Kahn's algorithm over `n` nodes. Returns fewer than n nodes if cyclic.
std::vector<std::size_t> kahn_order(std::size_t n,
                                    const std::vector<std::vector<std::size_t>>& succ) {
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& out : succ)
    for (auto v : out) ++indeg[v];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  return order;
}

// Tarjan's strongly connected components; returns component id per node.
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& succ,
                                            std::size_t& count) {
  const std::size_t n = succ.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  count = 0;

  // iterative DFS: frame = (node, next successor position)
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < succ[v].size()) {
        auto w = succ[v][pos++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      auto finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        auto parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

}  // namespace

ValidationReport validate_network(const NetworkDescription& d) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (d.name.empty()) fail("network name is empty");
  if (d.layers.empty()) fail("network has no layers");

  std::unordered_map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < d.layers.size(); ++i) {
    if (!index.emplace(d.layers[i].id, i).second)
      fail("duplicate layer id " + std::to_string(d.layers[i].id));
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::vector<std::size_t>> succ(d.layers.size());
  std::vector<std::vector<std::size_t>> undirected(d.layers.size());
  for (const auto& e : d.edges) {
    const auto edge_name = std::to_string(e.src_layer) + "->" + std::to_string(e.dst_layer);
    if (e.src_layer == e.dst_layer) {
      fail("self-loop on layer " + std::to_string(e.src_layer));
      continue;
    }
    auto s = index.find(e.src_layer);
    auto t = index.find(e.dst_layer);
    if (s == index.end() || t == index.end()) {
      fail("dangling edge " + edge_name);
      continue;
    }
    if (e.tensor_bytes == 0) fail("zero-sized tensor on edge " + edge_name);
    if (!seen.emplace(s->second, t->second).second) {
      fail("duplicate edge " + edge_name);
      continue;
    }
    succ[s->second].push_back(t->second);
    undirected[s->second].push_back(t->second);
    undirected[t->second].push_back(s->second);
  }

  if (!d.layers.empty()) {
    if (kahn_order(d.layers.size(), succ).size() != d.layers.size()) fail("cycle");

    std::vector<bool> reached(d.layers.size(), false);
    std::vector<std::size_t> todo{0};
    reached[0] = true;
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      for (auto w : undirected[v])
        if (!reached[w]) {
          reached[w] = true;
          todo.push_back(w);
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end())
      fail("network is not weakly connected");
  }
  return report;
}

NetworkGraph::NetworkGraph(NetworkDescription d) {
  auto report = validate_network(d);
  if (!report.ok()) {
    std::ostringstream msg;
    msg << "invalid network '" << d.name << "':";
    for (const auto& v : report.violations) msg << ' ' << v << ';';
    throw ValidationError(msg.str());
  }
  name_ = std::move(d.name);
  layers_ = std::move(d.layers);
  input_bytes_ = d.input_bytes;
  output_bytes_ = d.output_bytes;
  for (std::size_t i = 0; i < layers_.size(); ++i) index_.emplace(layers_[i].id, i);

  std::sort(d.edges.begin(), d.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src_layer, a.dst_layer) < std::tie(b.src_layer, b.dst_layer);
  });
  edges_.reserve(d.edges.size());
  in_edges_.resize(layers_.size());
  out_edges_.resize(layers_.size());
  for (const auto& e : d.edges) {
    Edge edge{index_.at(e.src_layer), index_.at(e.dst_layer), e.tensor_bytes};
    out_edges_[edge.src].push_back(edges_.size());
    in_edges_[edge.dst].push_back(edges_.size());
    edges_.push_back(edge);
  }

  std::vector<std::vector<std::size_t>> succ(layers_.size());
  for (const auto& e : edges_) succ[e.src].push_back(e.dst);
  topo_ = kahn_order(layers_.size(), succ);
}

std::size_t NetworkGraph::index_of(std::int64_t layer_id) const {
  auto it = index_.find(layer_id);
  if (it == index_.end())
    throw ValidationError("network '" + name_ + "' has no layer id " + std::to_string(layer_id));
  return it->second;
}

NetworkDescription NetworkGraph::description() const {
  NetworkDescription d{name_, layers_, {}, input_bytes_, output_bytes_};
  d.edges.reserve(edges_.size());
  for (const auto& e : edges_)
    d.edges.push_back({layers_[e.src].id, layers_[e.dst].id, e.tensor_bytes});
  return d;
}

std::vector<QuotientInput> PartitionedNetwork::inputs_of(std::size_t subgraph,
                                                         const NetworkGraph& graph) const {
  std::map<std::size_t, std::uint64_t> bytes;
  for (const auto& port : subgraphs[subgraph].boundary_in)
    if (port.edge) bytes[port.peer] += graph.edges()[*port.edge].tensor_bytes;
  std::vector<QuotientInput> inputs;
  inputs.reserve(bytes.size());
  for (auto [producer, b] : bytes) inputs.push_back({producer, b});
  return inputs;
}

bool PartitionedNetwork::takes_host_input(std::size_t subgraph) const {
  const auto& in = subgraphs[subgraph].boundary_in;
  return std::any_of(in.begin(), in.end(), [](const auto& p) { return !p.edge; });
}

bool PartitionedNetwork::sends_host_output(std::size_t subgraph) const {
  const auto& out = subgraphs[subgraph].boundary_out;
  return std::any_of(out.begin(), out.end(), [](const auto& p) { return !p.edge; });
}

PartitionedNetwork decode_partition(const NetworkGraph& graph,
                                    std::span<const std::uint8_t> cut_bits) {
  if (cut_bits.size() != graph.edge_count())
    throw ValidationError("partition for '" + graph.name() + "' has " +
                          std::to_string(cut_bits.size()) + " bits, expected " +
                          std::to_string(graph.edge_count()));
  const auto n = graph.layer_count();
  const auto edges = graph.edges();

  DisjointSets sets(n);
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (!cut_bits[i]) sets.unite(edges[i].src, edges[i].dst);

  // Merge quotient cycles until the quotient graph is a DAG. The
  // condensation is acyclic after one pass; the loop only guards that claim.
  for (;;) {
    std::vector<std::size_t> roots;
    std::vector<std::size_t> node_of(n);
    std::unordered_map<std::size_t, std::size_t> dense;
    for (std::size_t l = 0; l < n; ++l) {
      auto r = sets.find(l);
      auto [it, fresh] = dense.emplace(r, roots.size());
      if (fresh) roots.push_back(r);
      node_of[l] = it->second;
    }
    std::vector<std::vector<std::size_t>> succ(roots.size());
    for (const auto& e : edges) {
      auto a = node_of[e.src], b = node_of[e.dst];
      if (a != b) succ[a].push_back(b);
    }
    std::size_t comps = 0;
    auto comp = strongly_connected(succ, comps);
    if (comps == roots.size()) break;
    std::vector<std::size_t> first(comps, kHost);
    for (std::size_t v = 0; v < roots.size(); ++v) {
      if (first[comp[v]] == kHost)
        first[comp[v]] = roots[v];
      else
        sets.unite(first[comp[v]], roots[v]);
    }
  }

  // Dense component ids ordered by smallest member layer.
  std::vector<std::size_t> comp_of(n);
  std::unordered_map<std::size_t, std::size_t> dense;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t l = 0; l < n; ++l) {
    auto [it, fresh] = dense.emplace(sets.find(l), members.size());
    if (fresh) members.emplace_back();
    comp_of[l] = it->second;
    members[it->second].push_back(l);
  }
  std::vector<std::vector<std::size_t>> succ(members.size());
  for (const auto& e : edges) {
    auto a = comp_of[e.src], b = comp_of[e.dst];
    if (a != b) succ[a].push_back(b);
  }
  auto order = kahn_order(members.size(), succ);
  std::vector<std::size_t> rank(members.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  PartitionedNetwork pn;
  pn.network = graph.name();
  pn.subgraphs.resize(members.size());
  pn.subgraph_of.resize(n);
  for (std::size_t c = 0; c < members.size(); ++c) pn.subgraphs[rank[c]].layers = members[c];
  for (std::size_t l = 0; l < n; ++l) pn.subgraph_of[l] = rank[comp_of[l]];

  for (std::size_t s = 0; s < pn.subgraphs.size(); ++s) {
    auto& sg = pn.subgraphs[s];
    bool host_in = false, host_out = false;
    for (auto l : sg.layers) {
      host_in = host_in || graph.is_source(l);
      host_out = host_out || graph.is_sink(l);
    }
    if (host_in) sg.boundary_in.push_back({std::nullopt, kHost});
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto a = pn.subgraph_of[edges[i].src], b = pn.subgraph_of[edges[i].dst];
      if (a == b) continue;
      if (b == s) sg.boundary_in.push_back({i, a});
      if (a == s) sg.boundary_out.push_back({i, b});
    }
    if (host_out) sg.boundary_out.push_back({std::nullopt, kHost});
  }
  return pn;
}

std::vector<std::size_t> decode_mapping(const PartitionedNetwork& partition,
                                        std::span<const std::uint16_t> layer_prefs,
                                        std::size_t processor_count) {
  if (layer_prefs.size() != partition.subgraph_of.size())
    throw ValidationError("mapping for '" + partition.network + "' has " +
                          std::to_string(layer_prefs.size()) + " genes, expected " +
                          std::to_string(partition.subgraph_of.size()));
  std::vector<std::size_t> assignment;
  assignment.reserve(partition.subgraphs.size());
  std::vector<std::size_t> votes(processor_count);
  for (const auto& sg : partition.subgraphs) {
    std::fill(votes.begin(), votes.end(), 0);
    for (auto l : sg.layers) {
      if (layer_prefs[l] >= processor_count)
        throw ValidationError("invalid processor index " + std::to_string(layer_prefs[l]) +
                              " in mapping for '" + partition.network + "'");
      ++votes[layer_prefs[l]];
    }
    // max_element returns the first maximum: lowest processor index wins ties
    assignment.push_back(static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin()));
  }
  return assignment;
}

}  // namespace hetsched
