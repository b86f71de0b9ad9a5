#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "farsec/header.hpp"
#include "farsec/secure_network.hpp"
#include "farsec/sla.hpp"
#include "farsec/solver.hpp"

namespace farsec {

/// Inclusive integer range of security levels.
struct LevelRange {
  SecurityLevel lo = 0;
  SecurityLevel hi = 0;

  friend bool operator==(const LevelRange&, const LevelRange&) = default;
};

struct GenConfig {
  int size = 11;
  std::uint64_t seed = 1;
  LevelRange root_to_hub{0, 30};
  LevelRange hub_to_leaf{0, 10};
  LevelRange leaf_to_leaf{0, 2};
  std::int64_t flow_multiplier = 64;
};

/// Where a host attaches to the switching fabric.
struct HostAttachment {
  std::string host;
  NodeId device;
  Ipv4Address address;

  friend bool operator==(const HostAttachment&, const HostAttachment&) = default;
};

struct GeneratedInstance {
  GenConfig config;
  SecureNetwork network;
  std::vector<Flow> flows;
  std::map<std::string, SecurityLevel> requirements;  // by flow id
  SlaPolicy sla;  // reproduces `requirements` from the flow headers
  std::vector<HostAttachment> hosts;
};

/// Deterministic semi-random benchmark instance.
///
/// Topology: node s1 is the root; ceil(sqrt(size - 1)) hubs hang off it and
/// the remaining nodes are leaves dealt round-robin to the hubs. Siblings
/// under a hub are chained into a bus, and the leaves of the first hub form a
/// full mesh instead. Each adjacency becomes two directed links with
/// independent levels: root-hub from root_to_hub, hub-leaf from hub_to_leaf,
/// leaf-leaf from leaf_to_leaf. Sizes 2 and 3 have no leaves and degenerate
/// to a chain through the root.
///
/// Flows: flow_multiplier times the sum of all link levels, endpoints drawn
/// uniformly over distinct ordered pairs, requirement drawn uniformly from
/// the union of the three level ranges. Each flow carries a UDP header whose
/// destination port is 5000 + requirement, and `sla` maps those ports back to
/// the requirement.
///
/// Random stream: std::mt19937_64 seeded with `seed`, bounded integers by
/// rejection sampling; levels are drawn in link emission order, then
/// (origin, destination, requirement) per flow.
GeneratedInstance generate(const GenConfig& cfg);

std::string format_hosts(const std::vector<HostAttachment>& hosts);
std::vector<HostAttachment> parse_hosts(std::string_view text);

/// Base file name, e.g. "instance-n11-seed7".
std::string instance_stem(const GenConfig& cfg);

/// Writes <stem>.resources.csv, .requests.csv, .sla.csv and .hosts.csv.
/// Returns the paths written.
std::vector<std::filesystem::path> write_instance(const GeneratedInstance& inst,
                                                  const std::filesystem::path& dir);

}  // namespace farsec
