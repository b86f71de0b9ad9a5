#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "farsec/header.hpp"
#include "farsec/secure_network.hpp"

namespace farsec {

struct PortRange {
  std::uint16_t min = 0;
  std::uint16_t max = 65535;

  [[nodiscard]] bool contains(std::uint16_t port) const noexcept {
    return min <= port && port <= max;
  }
  friend bool operator==(const PortRange&, const PortRange&) = default;
};

/// One SLA entry. DSCP is matched by exact equality.
struct SlaRule {
  IpProtocol protocol = IpProtocol::Udp;
  Ipv4Prefix source;
  Ipv4Prefix destination;
  std::uint8_t dscp = 0;
  PortRange source_ports;
  PortRange destination_ports;
  SecurityLevel min_security = 0;

  [[nodiscard]] bool matches(const HeaderFields& fields) const noexcept;
  friend bool operator==(const SlaRule&, const SlaRule&) = default;
};

/// Ordered rule list. The first matching rule in file order decides; packets
/// matching no rule get default_min_security.
struct SlaPolicy {
  std::vector<SlaRule> rules;
  SecurityLevel default_min_security = 0;

  friend bool operator==(const SlaPolicy&, const SlaPolicy&) = default;
};

inline constexpr std::string_view kSlaHeader =
    "Protocol,SourceAddress,DestinationAddress,DSCP,SourcePortMin,SourcePortMax,"
    "DestinationPortMin,DestinationPortMax,MinSec";

/// Throws ParseError on a wrong header line, bad CIDR, unknown protocol,
/// out-of-range port or DSCP, negative MinSec, or a port range with min > max.
SlaPolicy parse_sla(std::string_view text);
SlaPolicy load_sla(std::istream& in);
std::string format_sla(const SlaPolicy& policy);

SecurityLevel min_security(const SlaPolicy& policy, const HeaderFields& fields) noexcept;

}  // namespace farsec
