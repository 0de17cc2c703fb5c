#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "hetsched/graph.hpp"

namespace hetsched {

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& digest);
Digest digest_from_hex(std::string_view hex);

// Content hash of a subgraph, computed bottom-up like a Merkle tree:
//
//   node   = H(op_kind, param_bytes, mac_count,
//              sorted digests of in-subgraph predecessors,
//              sorted sizes of tensors entering from outside)
//   digest = H(network name, sorted digests of in-subgraph sinks)
//
// Layer ids do not enter the hash, so two equally shaped subgraphs of a
// network share a digest and therefore a cached profile entry.
Digest subgraph_hash(const Subgraph& subgraph, const NetworkGraph& graph);

}  // namespace hetsched
