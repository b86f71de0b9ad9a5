#pragma once

#include <optional>
#include <vector>

#include "farsec/secure_network.hpp"

namespace farsec {

/// All-pairs widest (maximum-bottleneck) paths.
///
/// width(i, j) is the largest bottleneck over all paths i -> j, kUnbounded on
/// the diagonal, and 0 when j is unreachable from i. Because 0 is also a
/// legitimate bottleneck, reachability is read from next_hop()/path(), never
/// from width() alone.
class WidestPaths {
 public:
  WidestPaths() = default;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  [[nodiscard]] SecurityLevel width(NodeIndex from, NodeIndex to) const {
    return width_.at(from * n_ + to);
  }
  [[nodiscard]] std::optional<NodeIndex> next_hop(NodeIndex from, NodeIndex to) const;
  /// Reconstructed widest path; empty on the diagonal and for unreachable pairs.
  [[nodiscard]] const Path& path(NodeIndex from, NodeIndex to) const {
    return paths_.at(from * n_ + to);
  }
  [[nodiscard]] bool reachable(NodeIndex from, NodeIndex to) const {
    return next_hop(from, to).has_value();
  }

  friend bool operator==(const WidestPaths&, const WidestPaths&) = default;

 private:
  friend WidestPaths all_pairs_widest(const SecureNetwork&);

  static constexpr NodeIndex kNoHop = static_cast<NodeIndex>(-1);

  std::size_t n_ = 0;
  std::vector<SecurityLevel> width_;
  std::vector<NodeIndex> next_;
  std::vector<Path> paths_;
};

/// Floyd-Warshall over the (max, min) semiring with next-hop tracking,
/// followed by path reconstruction from the next-hop matrix. Theta(|V|^3).
WidestPaths all_pairs_widest(const SecureNetwork& net);

struct WidestWitness {
  SecurityLevel width = 0;
  Path path;
};

/// Exhaustive reference: enumerates every simple path origin -> destination
/// and returns the best bottleneck with one path achieving it. Returns
/// (0, empty) when unreachable and (kUnbounded, empty) when origin equals
/// destination. Exponential; intended for small networks and tests.
WidestWitness oracle_widest(const SecureNetwork& net, NodeIndex origin, NodeIndex destination);

}  // namespace farsec
