#include "farsec/sla.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace {

IpProtocol parse_protocol(std::string_view text, const std::string& at) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "UDP") return IpProtocol::Udp;
  if (upper == "TCP") return IpProtocol::Tcp;
  if (upper == "ICMP") return IpProtocol::Icmp;
  throw ParseError(at + ": unknown protocol '" + std::string(text) + "'");
}

std::uint16_t parse_port(std::string_view text, const std::string& what) {
  const auto value = csv::parse_int<long>(text, what);
  if (value < 0 || value > 65535) {
    throw ParseError(what + ": port " + std::string(text) + " outside 0-65535");
  }
  return static_cast<std::uint16_t>(value);
}

PortRange parse_range(std::string_view lo, std::string_view hi, const std::string& what) {
  PortRange r{parse_port(lo, what + "Min"), parse_port(hi, what + "Max")};
  if (r.min > r.max) {
    throw ParseError(what + ": min " + std::to_string(r.min) + " > max " + std::to_string(r.max));
  }
  return r;
}

Ipv4Prefix parse_cidr(std::string_view text, const std::string& what) {
  try {
    return Ipv4Prefix::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

bool SlaRule::matches(const HeaderFields& f) const noexcept {
  return f.protocol == protocol && source.contains(f.source) &&
         destination.contains(f.destination) && f.dscp == dscp &&
         source_ports.contains(f.source_port) && destination_ports.contains(f.destination_port);
}

SlaPolicy parse_sla(std::string_view text) {
  const auto rows = csv::lines(text, "sla");
  if (rows.empty() || rows.front() != kSlaHeader) {
    throw ParseError("sla: header must be '" + std::string(kSlaHeader) + "'");
  }
  SlaPolicy policy;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto at = csv::where("sla", i + 1);
    const auto f = csv::split(rows[i]);
    if (f.size() != 9) {
      throw ParseError(at + ": expected 9 fields, got " + std::to_string(f.size()));
    }
    SlaRule rule;
    rule.protocol = parse_protocol(f[0], at);
    rule.source = parse_cidr(f[1], at + " SourceAddress");
    rule.destination = parse_cidr(f[2], at + " DestinationAddress");
    const auto dscp = csv::parse_int<int>(f[3], at + " DSCP");
    if (dscp < 0 || dscp > 63) {
      throw ParseError(at + ": DSCP " + std::to_string(dscp) + " outside 0-63");
    }
    rule.dscp = static_cast<std::uint8_t>(dscp);
    rule.source_ports = parse_range(f[4], f[5], at + " SourcePort");
    rule.destination_ports = parse_range(f[6], f[7], at + " DestinationPort");
    rule.min_security = csv::parse_int<SecurityLevel>(f[8], at + " MinSec");
    if (rule.min_security < 0 || rule.min_security == kUnbounded) {
      throw ParseError(at + ": MinSec must be a nonnegative level");
    }
    policy.rules.push_back(rule);
  }
  return policy;
}

SlaPolicy load_sla(std::istream& in) { return parse_sla(csv::slurp(in)); }

std::string format_sla(const SlaPolicy& policy) {
  std::ostringstream out;
  out << kSlaHeader << '\n';
  for (const auto& r : policy.rules) {
    out << to_string(r.protocol) << ',' << r.source.to_string() << ','
        << r.destination.to_string() << ',' << int{r.dscp} << ',' << r.source_ports.min << ','
        << r.source_ports.max << ',' << r.destination_ports.min << ',' << r.destination_ports.max
        << ',' << r.min_security << '\n';
  }
  return out.str();
}

SecurityLevel min_security(const SlaPolicy& policy, const HeaderFields& fields) noexcept {
  for (const auto& rule : policy.rules) {
    if (rule.matches(fields)) {
      return rule.min_security;
    }
  }
  return policy.default_min_security;
}

}  // namespace farsec
