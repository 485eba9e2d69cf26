#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "pcgraph/layer_spec.hpp"
#include "pcgraph/types.hpp"

namespace pcgraph::topology {

/// Block families of a layer-partitioned weight matrix. Block (l, k) holds
/// connections from layer k into layer l.
enum class ConnectionKind : std::uint8_t {
  Forward,       // (l, l-1)
  ForwardSkip,   // (l, k), k < l-1
  Backward,      // (l, l+1)
  BackwardSkip,  // (l, k), k > l+1
  Lateral,       // (l, l) without the diagonal
  SelfLoop,      // the diagonal
  AllToAll,      // everything but the diagonal
};

using ConnectionSet = std::set<ConnectionKind>;

std::string_view to_string(ConnectionKind kind);
std::optional<ConnectionKind> parse_connection_kind(std::string_view name);

/// Parses a comma-separated list such as "forward,forwardskip".
/// Throws DomainError on unknown or empty input.
ConnectionSet parse_connection_set(std::string_view text);
std::string format_connection_set(const ConnectionSet& kinds);

/// Union of the block patterns of `kinds`. Throws DomainError if empty.
Mask build_mask(const LayerSpec& spec, const ConnectionSet& kinds);

/// Multiply-adds per stored weight per inference step: one for the prediction
/// product and one for the error back-projection. Holds for both conventions.
inline constexpr std::uint64_t kMaddsPerConnection = 2;

struct CostReport {
  std::uint64_t node_count = 0;     // N
  std::uint64_t connections = 0;    // d
  std::uint64_t steps = 0;          // T
  std::uint64_t dense_ops = 0;      // N^2 T
  std::uint64_t sparse_ops = 0;     // c d T
  std::uint64_t depth = 0;          // L
  std::uint64_t largest_block = 0;  // M = max n_l n_{l+1}
  /// L M; covers the consecutive forward blocks only.
  std::uint64_t fnn_ops = 0;
};

/// Throws DomainError if the mask is not N x N for `spec`.
CostReport cost_report(const LayerSpec& spec, const Mask& mask, std::uint64_t steps);

}  // namespace pcgraph::topology
