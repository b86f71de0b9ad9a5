#include "farsec/secure_network.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace {

constexpr std::string_view kResourcesHeader = "Source,Destination,Security";

}  // namespace

std::vector<NodeIndex> Path::nodes() const {
  std::vector<NodeIndex> out;
  if (edges.empty()) {
    return out;
  }
  out.reserve(edges.size() + 1);
  out.push_back(edges.front().src);
  for (const auto& e : edges) {
    out.push_back(e.dst);
  }
  return out;
}

std::optional<NodeIndex> SecureNetwork::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

NodeIndex SecureNetwork::index_of(std::string_view id) const {
  if (auto idx = find(id)) {
    return *idx;
  }
  throw NotFoundError("unknown node '" + std::string(id) + "'");
}

bool SecureNetwork::has_edge(Edge e) const noexcept { return try_level(e).has_value(); }

std::optional<SecurityLevel> SecureNetwork::try_level(Edge e) const noexcept {
  const auto n = nodes_.size();
  if (e.src >= n || e.dst >= n) {
    return std::nullopt;
  }
  const auto level = levels_[e.src * n + e.dst];
  if (level == kNoEdge) {
    return std::nullopt;
  }
  return level;
}

SecurityLevel SecureNetwork::level(Edge e) const {
  if (auto level = try_level(e)) {
    return *level;
  }
  throw NotFoundError("edge " + describe(e) + " is not part of the network");
}

std::string SecureNetwork::describe(Edge e) const {
  const auto label = [this](NodeIndex i) {
    return i < nodes_.size() ? nodes_[i] : "#" + std::to_string(i);
  };
  return "(" + label(e.src) + "," + label(e.dst) + ")";
}

SecureNetwork build_network(std::span<const NodeId> nodes, std::span<const Link> links) {
  SecureNetwork net;
  net.nodes_.reserve(nodes.size());
  for (const auto& id : nodes) {
    if (id.empty()) {
      throw ValidationError("node ids must be non-empty");
    }
    if (!net.index_.emplace(id, net.nodes_.size()).second) {
      throw ValidationError("duplicate node '" + id + "'");
    }
    net.nodes_.push_back(id);
  }

  const auto n = net.nodes_.size();
  net.levels_.assign(n * n, SecureNetwork::kNoEdge);
  net.successors_.assign(n, {});
  net.links_.reserve(links.size());
  for (const auto& link : links) {
    const auto src = net.find(link.src);
    const auto dst = net.find(link.dst);
    if (!src || !dst) {
      throw ValidationError("link (" + link.src + "," + link.dst + ") has an unknown endpoint '" +
                            (src ? link.dst : link.src) + "'");
    }
    if (*src == *dst) {
      throw ValidationError("self-loop on '" + link.src + "'");
    }
    if (link.level < 0) {
      throw ValidationError("link (" + link.src + "," + link.dst + ") has negative level " +
                            std::to_string(link.level));
    }
    if (link.level == kUnbounded) {
      throw ValidationError("link (" + link.src + "," + link.dst + ") level is too large");
    }
    auto& slot = net.levels_[*src * n + *dst];
    if (slot != SecureNetwork::kNoEdge) {
      throw ValidationError("duplicate link (" + link.src + "," + link.dst + ")");
    }
    slot = link.level;
    net.successors_[*src].push_back(*dst);
    net.links_.push_back(link);
  }
  return net;
}

SecureNetwork network_from_links(std::span<const Link> links) {
  std::vector<NodeId> nodes;
  std::unordered_map<std::string, bool> seen;
  for (const auto& link : links) {
    for (const auto* id : {&link.src, &link.dst}) {
      if (seen.emplace(*id, true).second) {
        nodes.push_back(*id);
      }
    }
  }
  return build_network(nodes, links);
}

bool path_is_valid_simple(const SecureNetwork& net, const Path& p, NodeIndex origin,
                          NodeIndex destination) {
  for (const auto& e : p.edges) {
    if (!net.has_edge(e)) {
      throw NotFoundError("edge " + net.describe(e) + " is not part of the network");
    }
  }
  if (p.empty()) {
    return false;
  }
  if (p.edges.front().src != origin || p.edges.back().dst != destination) {
    return false;
  }
  for (std::size_t i = 0; i + 1 < p.edges.size(); ++i) {
    if (p.edges[i].dst != p.edges[i + 1].src) {
      return false;
    }
  }
  std::vector<bool> visited(net.node_count(), false);
  for (const auto v : p.nodes()) {
    if (visited[v]) {
      return false;
    }
    visited[v] = true;
  }
  return true;
}

SecurityLevel path_bottleneck(const SecureNetwork& net, const Path& p) {
  SecurityLevel bottleneck = kUnbounded;
  for (const auto& e : p.edges) {
    bottleneck = std::min(bottleneck, net.level(e));
  }
  return bottleneck;
}

Path path_through(const SecureNetwork& net, std::span<const NodeId> hops) {
  Path p;
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const Edge e{net.index_of(hops[i]), net.index_of(hops[i + 1])};
    if (!net.has_edge(e)) {
      throw NotFoundError("edge " + net.describe(e) + " is not part of the network");
    }
    p.edges.push_back(e);
  }
  return p;
}

std::vector<NodeId> path_names(const SecureNetwork& net, const Path& p) {
  std::vector<NodeId> out;
  for (const auto v : p.nodes()) {
    out.push_back(net.name(v));
  }
  return out;
}

SecureNetwork parse_resources(std::string_view text) {
  const auto rows = csv::lines(text, "resources");
  if (rows.empty() || rows.front() != kResourcesHeader) {
    throw ParseError("resources: header must be '" + std::string(kResourcesHeader) + "'");
  }
  std::vector<Link> links;
  links.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto at = csv::where("resources", i + 1);
    const auto fields = csv::split(rows[i]);
    if (fields.size() != 3) {
      throw ParseError(at + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(at + ": empty node id");
    }
    links.push_back(Link{std::string(fields[0]), std::string(fields[1]),
                         csv::parse_int<SecurityLevel>(fields[2], at + " Security")});
  }
  return network_from_links(links);
}

SecureNetwork read_resources(std::istream& in) { return parse_resources(csv::slurp(in)); }

std::string format_resources(const SecureNetwork& net) {
  std::ostringstream out;
  out << kResourcesHeader << '\n';
  for (const auto& link : net.links()) {
    out << link.src << ',' << link.dst << ',' << link.level << '\n';
  }
  return out.str();
}

}  // namespace farsec
