#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "farsec/header.hpp"
#include "farsec/secure_network.hpp"
#include "farsec/sla.hpp"
#include "farsec/widest_paths.hpp"

namespace farsec {

/// A flow to admit: endpoints plus the raw header its packets carry.
struct Flow {
  std::string id;
  NodeId origin;
  NodeId destination;
  Bytes header;

  friend bool operator==(const Flow&, const Flow&) = default;
};

/// Minimum security requirement of a header. Must be total on the headers it
/// is asked about.
using MinSecurityFn = std::function<SecurityLevel(std::span<const std::uint8_t>)>;

/// Requirement function backed by an SLA policy. Headers that do not decode
/// as IPv4 raise ParseError.
MinSecurityFn sla_min_security(SlaPolicy policy);

struct Assignment {
  std::string flow_id;
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  SecurityLevel requirement = 0;
  Path path;  // empty: the flow is rejected

  [[nodiscard]] bool admitted() const noexcept { return !path.empty(); }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Flow -> path assignment, in input flow order.
class Mapping {
 public:
  Mapping() = default;
  explicit Mapping(std::vector<Assignment> assignments);

  [[nodiscard]] const std::vector<Assignment>& assignments() const noexcept {
    return assignments_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return assignments_.size(); }
  [[nodiscard]] const Assignment* find(std::string_view flow_id) const;
  [[nodiscard]] std::size_t admitted_count() const noexcept;

  friend bool operator==(const Mapping&, const Mapping&) = default;

 private:
  std::vector<Assignment> assignments_;
};

/// Bottleneck level of every reconstructed widest path, kUnbounded for
/// empty cells.
class BottleneckMatrix {
 public:
  BottleneckMatrix(const SecureNetwork& net, const WidestPaths& widest);

  [[nodiscard]] SecurityLevel at(NodeIndex from, NodeIndex to) const {
    return levels_.at(from * n_ + to);
  }

 private:
  std::size_t n_;
  std::vector<SecurityLevel> levels_;
};

/// Assigns each flow the widest path between its endpoints when that path's
/// bottleneck meets the flow's requirement, and the empty path otherwise.
/// Throws NotFoundError for unknown endpoints and ValidationError for flows
/// whose origin equals their destination, empty headers or duplicate ids.
Mapping solve(const SecureNetwork& net, std::span<const Flow> flows, const MinSecurityFn& min_sec);
Mapping solve(const SecureNetwork& net, const WidestPaths& widest, std::span<const Flow> flows,
              const MinSecurityFn& min_sec);
Mapping solve(const SecureNetwork& net, const WidestPaths& widest,
              const BottleneckMatrix& bottleneck, std::span<const Flow> flows,
              const MinSecurityFn& min_sec);

// Requests CSV: "FlowID,Source,Destination,Header" with the header as hex.
std::vector<Flow> parse_requests(std::string_view text);
std::vector<Flow> read_requests(std::istream& in);
std::string format_requests(std::span<const Flow> flows);

/// "FlowID,Admitted,Path": Admitted is 1 or 0, Path is '-' for a rejected
/// flow or the visited nodes joined with '|'.
std::string format_mapping(const SecureNetwork& net, const Mapping& mapping);

}  // namespace farsec
