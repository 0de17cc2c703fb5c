#include "hetsched/merkle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hetsched/error.hpp"

namespace hetsched {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 initialisation failed");
  }

  // Fields are length-prefixed so concatenations cannot collide.
  Sha256& field(std::string_view bytes) {
    u64(bytes.size());
    EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
    return *this;
  }
  Sha256& u64(std::uint64_t v) {
    std::uint8_t le[8];
    for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(v >> (8 * i));
    EVP_DigestUpdate(ctx_.get(), le, sizeof le);
    return *this;
  }
  Sha256& digest(const Digest& d) {
    EVP_DigestUpdate(ctx_.get(), d.data(), d.size());
    return *this;
  }
  Digest finish() {
    Digest out{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string to_hex(const Digest& digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : digest) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xf]);
  }
  return s;
}

Digest digest_from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw ValidationError("invalid hex digit in digest");
  };
  if (hex.size() != 64) throw ValidationError("digest must be 64 hex characters");
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i)
    d[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return d;
}

Digest subgraph_hash(const Subgraph& subgraph, const NetworkGraph& graph) {
  std::unordered_map<std::size_t, Digest> node;
  node.reserve(subgraph.layers.size());
  auto inside = [&](std::size_t l) {
    return std::binary_search(subgraph.layers.begin(), subgraph.layers.end(), l);
  };

  std::vector<Digest> preds;
  std::vector<std::uint64_t> external;
  for (auto l : graph.topological_order()) {
    if (!inside(l)) continue;
    preds.clear();
    external.clear();
    for (auto e : graph.in_edges(l)) {
      const auto& edge = graph.edges()[e];
      if (inside(edge.src))
        preds.push_back(node.at(edge.src));
      else
        external.push_back(edge.tensor_bytes);
    }
    std::sort(preds.begin(), preds.end());
    std::sort(external.begin(), external.end());

    const auto& layer = graph.layers()[l];
    Sha256 h;
    h.field("node").field(layer.op_kind).u64(layer.param_bytes).u64(layer.mac_count);
    h.u64(preds.size());
    for (const auto& p : preds) h.digest(p);
    h.u64(external.size());
    for (auto b : external) h.u64(b);
    node.emplace(l, h.finish());
  }

  std::vector<Digest> sinks;
  for (auto l : subgraph.layers) {
    const auto out = graph.out_edges(l);
    bool sink = std::none_of(out.begin(), out.end(),
                             [&](std::size_t e) { return inside(graph.edges()[e].dst); });
    if (sink) sinks.push_back(node.at(l));
  }
  std::sort(sinks.begin(), sinks.end());

  Sha256 h;
  h.field("subgraph").field(graph.name()).u64(sinks.size());
  for (const auto& s : sinks) h.digest(s);
  return h.finish();
}

}  // namespace hetsched
