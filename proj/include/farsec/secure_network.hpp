#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace farsec {

/// Link security level. Levels are nonnegative and totally ordered by `<=`;
/// 0 means an unprotected link, larger values mean stronger protection.
using SecurityLevel = std::int64_t;

/// Bottleneck of the empty path and of the diagonal of the widest-path
/// matrix. Strictly greater than every level a network may carry.
inline constexpr SecurityLevel kUnbounded = std::numeric_limits<SecurityLevel>::max();

using NodeId = std::string;
using NodeIndex = std::size_t;

/// Directed edge between two node indices of a SecureNetwork.
struct Edge {
  NodeIndex src = 0;
  NodeIndex dst = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sequence of directed edges. An empty path is the "no path" marker.
struct Path {
  std::vector<Edge> edges;

  [[nodiscard]] bool empty() const noexcept { return edges.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return edges.size(); }

  /// Visited nodes: src of the first edge followed by every edge's dst.
  /// Empty for the empty path.
  [[nodiscard]] std::vector<NodeIndex> nodes() const;

  friend bool operator==(const Path&, const Path&) = default;
};

/// A directed link as it appears in input data, addressed by node names.
struct Link {
  NodeId src;
  NodeId dst;
  SecurityLevel level = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Directed graph with a security level on every edge. Immutable once built;
/// node indices follow insertion order.
class SecureNetwork {
 public:
  SecureNetwork() = default;

  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return links_.size(); }

  [[nodiscard]] const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const NodeId& name(NodeIndex index) const { return nodes_.at(index); }

  [[nodiscard]] std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws NotFoundError for unknown ids.
  [[nodiscard]] NodeIndex index_of(std::string_view id) const;

  /// Links in insertion order.
  [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }

  [[nodiscard]] bool has_edge(Edge e) const noexcept;
  /// Level of an existing edge; NotFoundError otherwise.
  [[nodiscard]] SecurityLevel level(Edge e) const;
  [[nodiscard]] std::optional<SecurityLevel> try_level(Edge e) const noexcept;

  /// Heads of the edges leaving `u`, in insertion order.
  [[nodiscard]] const std::vector<NodeIndex>& successors(NodeIndex u) const {
    return successors_.at(u);
  }

  [[nodiscard]] std::string describe(Edge e) const;

  friend bool operator==(const SecureNetwork& a, const SecureNetwork& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_;
  }

 private:
  friend SecureNetwork build_network(std::span<const NodeId>, std::span<const Link>);

  static constexpr SecurityLevel kNoEdge = -1;

  std::vector<NodeId> nodes_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<Link> links_;
  std::vector<SecurityLevel> levels_;  // dense |V|x|V|, kNoEdge where absent
  std::vector<std::vector<NodeIndex>> successors_;
};

/// Validates and builds a network. Throws ValidationError on an empty or
/// duplicate node id, unknown endpoint, self-loop, duplicate (src,dst) pair
/// or a level outside [0, kUnbounded).
SecureNetwork build_network(std::span<const NodeId> nodes, std::span<const Link> links);

/// Builds a network whose nodes are the link endpoints in order of first
/// appearance.
SecureNetwork network_from_links(std::span<const Link> links);

/// True iff `p` is non-empty, connected, runs from `origin` to `destination`
/// and visits no node twice. Throws NotFoundError if an edge of `p` is not
/// part of `net`.
bool path_is_valid_simple(const SecureNetwork& net, const Path& p, NodeIndex origin,
                          NodeIndex destination);

/// Smallest level along `p`; kUnbounded for the empty path.
SecurityLevel path_bottleneck(const SecureNetwork& net, const Path& p);

/// Builds a path from a node sequence; every consecutive pair must be an edge.
Path path_through(const SecureNetwork& net, std::span<const NodeId> hops);

std::vector<NodeId> path_names(const SecureNetwork& net, const Path& p);

// Resources CSV: "Source,Destination,Security" followed by one row per
// directed link. Rows are strictly directed.
SecureNetwork read_resources(std::istream& in);
SecureNetwork parse_resources(std::string_view text);
std::string format_resources(const SecureNetwork& net);

}  // namespace farsec
