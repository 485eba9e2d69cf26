#include "pcgraph/topology.hpp"

#include <algorithm>
#include <array>

#include "pcgraph/errors.hpp"

namespace pcgraph::topology {

namespace {

constexpr std::array<std::pair<ConnectionKind, std::string_view>, 7> kNames{{
    {ConnectionKind::Forward, "forward"},
    {ConnectionKind::ForwardSkip, "forwardskip"},
    {ConnectionKind::Backward, "backward"},
    {ConnectionKind::BackwardSkip, "backwardskip"},
    {ConnectionKind::Lateral, "lateral"},
    {ConnectionKind::SelfLoop, "selfloop"},
    {ConnectionKind::AllToAll, "alltoall"},
}};

// target/source are layer indices of the row and column node
bool admits(ConnectionKind kind, std::size_t target, std::size_t source, bool diagonal) {
  switch (kind) {
    case ConnectionKind::Forward:
      return source + 1 == target;
    case ConnectionKind::ForwardSkip:
      return source + 1 < target;
    case ConnectionKind::Backward:
      return target + 1 == source;
    case ConnectionKind::BackwardSkip:
      return target + 1 < source;
    case ConnectionKind::Lateral:
      return target == source && !diagonal;
    case ConnectionKind::SelfLoop:
      return diagonal;
    case ConnectionKind::AllToAll:
      return !diagonal;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(ConnectionKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "forward";
}

std::optional<ConnectionKind> parse_connection_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

ConnectionSet parse_connection_set(std::string_view text) {
  ConnectionSet kinds;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) {
      const auto kind = parse_connection_kind(item);
      if (!kind) throw DomainError("unknown connection kind '" + std::string(item) + "'");
      kinds.insert(*kind);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (kinds.empty()) throw DomainError("connection kinds must not be empty");
  return kinds;
}

std::string format_connection_set(const ConnectionSet& kinds) {
  std::string out;
  for (ConnectionKind kind : kinds) {
    if (!out.empty()) out += ',';
    out += to_string(kind);
  }
  return out;
}

Mask build_mask(const LayerSpec& spec, const ConnectionSet& kinds) {
  if (kinds.empty()) throw DomainError("connection kinds must not be empty");
  const auto n = static_cast<Eigen::Index>(spec.node_count());
  Mask mask = Mask::Constant(n, n, false);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t source = spec.layer_of(static_cast<std::size_t>(c));
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::size_t target = spec.layer_of(static_cast<std::size_t>(r));
      mask(r, c) = std::any_of(kinds.begin(), kinds.end(), [&](ConnectionKind kind) {
        return admits(kind, target, source, r == c);
      });
    }
  }
  return mask;
}

CostReport cost_report(const LayerSpec& spec, const Mask& mask, std::uint64_t steps) {
  const auto n = static_cast<Eigen::Index>(spec.node_count());
  if (mask.rows() != n || mask.cols() != n) throw DomainError("mask shape does not match spec");

  CostReport report;
  report.node_count = spec.node_count();
  report.connections = static_cast<std::uint64_t>(mask.count());
  report.steps = steps;
  report.dense_ops = report.node_count * report.node_count * steps;
  report.sparse_ops = kMaddsPerConnection * report.connections * steps;
  report.depth = spec.depth();
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    report.largest_block = std::max<std::uint64_t>(report.largest_block,
                                                   spec.width(l) * spec.width(l + 1));
  }
  report.fnn_ops = report.depth * report.largest_block;
  return report;
}

}  // namespace pcgraph::topology
