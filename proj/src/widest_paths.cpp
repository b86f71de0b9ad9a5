#include "farsec/widest_paths.hpp"

#include <algorithm>
#include <stdexcept>

namespace farsec {

std::optional<NodeIndex> WidestPaths::next_hop(NodeIndex from, NodeIndex to) const {
  const auto hop = next_.at(from * n_ + to);
  if (hop == kNoHop) {
    return std::nullopt;
  }
  return hop;
}

WidestPaths all_pairs_widest(const SecureNetwork& net) {
  // Unreached pairs carry -1 during relaxation so that paths whose
  // bottleneck is 0 still win the strict comparison against "no path".
  constexpr SecurityLevel kUnreached = -1;

  WidestPaths r;
  const auto n = net.node_count();
  r.n_ = n;
  r.width_.assign(n * n, kUnreached);
  r.next_.assign(n * n, WidestPaths::kNoHop);
  r.paths_.assign(n * n, Path{});

  for (NodeIndex u = 0; u < n; ++u) {
    for (const auto v : net.successors(u)) {
      r.width_[u * n + v] = net.level(Edge{u, v});
      r.next_[u * n + v] = v;
    }
  }
  for (NodeIndex v = 0; v < n; ++v) {
    r.width_[v * n + v] = kUnbounded;
    r.next_[v * n + v] = v;
  }

  for (NodeIndex k = 0; k < n; ++k) {
    for (NodeIndex i = 0; i < n; ++i) {
      const auto via_ik = r.width_[i * n + k];
      if (via_ik == kUnreached) {
        continue;
      }
      for (NodeIndex j = 0; j < n; ++j) {
        const auto candidate = std::min(via_ik, r.width_[k * n + j]);
        if (r.width_[i * n + j] < candidate) {
          r.width_[i * n + j] = candidate;
          r.next_[i * n + j] = r.next_[i * n + k];
        }
      }
    }
  }

  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = 0; j < n; ++j) {
      auto& width = r.width_[i * n + j];
      if (width == kUnreached) {
        width = 0;
        continue;
      }
      if (i == j) {
        continue;
      }
      auto& path = r.paths_[i * n + j];
      NodeIndex curr = i;
      while (curr != j) {
        const auto hop = r.next_[curr * n + j];
        if (hop == WidestPaths::kNoHop || path.edges.size() >= n) {
          throw std::logic_error("widest path reconstruction did not reach " + net.name(j) +
                                 " from " + net.name(i));
        }
        path.edges.push_back(Edge{curr, hop});
        curr = hop;
      }
    }
  }
  return r;
}

namespace {

struct SimplePathSearch {
  const SecureNetwork& net;
  NodeIndex destination;
  std::vector<bool> on_path;
  Path current;
  WidestWitness best;
  bool found = false;

  void visit(NodeIndex u, SecurityLevel bottleneck) {
    if (u == destination) {
      if (!found || bottleneck > best.width) {
        best.width = bottleneck;
        best.path = current;
        found = true;
      }
      return;
    }
    for (const auto v : net.successors(u)) {
      if (on_path[v]) {
        continue;
      }
      const Edge e{u, v};
      on_path[v] = true;
      current.edges.push_back(e);
      visit(v, std::min(bottleneck, net.level(e)));
      current.edges.pop_back();
      on_path[v] = false;
    }
  }
};

}  // namespace

WidestWitness oracle_widest(const SecureNetwork& net, NodeIndex origin, NodeIndex destination) {
  if (origin >= net.node_count() || destination >= net.node_count()) {
    throw std::out_of_range("oracle_widest: node index out of range");
  }
  if (origin == destination) {
    return {kUnbounded, {}};
  }
  SimplePathSearch search{net, destination, std::vector<bool>(net.node_count(), false), {}, {}};
  search.on_path[origin] = true;
  search.visit(origin, kUnbounded);
  if (!search.found) {
    return {0, {}};
  }
  return search.best;
}

}  // namespace farsec
