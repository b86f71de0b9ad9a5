#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace farsec {

using Bytes = std::vector<std::uint8_t>;

/// IP protocol number. Values other than the named ones are legal and stand
/// for "other" protocols.
enum class IpProtocol : std::uint8_t { Icmp = 1, Tcp = 6, Udp = 17 };

std::string to_string(IpProtocol protocol);
[[nodiscard]] bool carries_ports(IpProtocol protocol) noexcept;

class Ipv4Address {
 public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

  /// Strict dotted quad: four decimal octets, no leading zeros.
  static Ipv4Address parse(std::string_view text);

  [[nodiscard]] constexpr std::uint32_t value() const noexcept { return value_; }
  [[nodiscard]] std::string to_string() const;

  friend constexpr auto operator<=>(Ipv4Address, Ipv4Address) = default;

 private:
  std::uint32_t value_ = 0;
};

/// Address plus prefix length. The address is kept as written so that
/// formatting round-trips; matching masks off the host bits.
class Ipv4Prefix {
 public:
  constexpr Ipv4Prefix() = default;
  Ipv4Prefix(Ipv4Address address, int length);

  /// "a.b.c.d/len" with 0 <= len <= 32.
  static Ipv4Prefix parse(std::string_view text);

  [[nodiscard]] Ipv4Address address() const noexcept { return address_; }
  [[nodiscard]] int length() const noexcept { return length_; }
  [[nodiscard]] bool contains(Ipv4Address addr) const noexcept;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Ipv4Prefix&, const Ipv4Prefix&) = default;

 private:
  Ipv4Address address_;
  int length_ = 0;
};

/// Match-relevant fields of an IPv4 packet header.
struct HeaderFields {
  IpProtocol protocol = IpProtocol::Udp;
  Ipv4Address source;
  Ipv4Address destination;
  std::uint8_t dscp = 0;  // top six bits of the TOS byte
  std::uint16_t source_port = 0;
  std::uint16_t destination_port = 0;

  friend auto operator<=>(const HeaderFields&, const HeaderFields&) = default;
};

/// Decodes an IPv4 header. Ports are read from the first four bytes after the
/// IP header (IHL-aware) for TCP and UDP, and are 0 for every other protocol.
/// Throws ParseError for truncated input, a version other than 4 or IHL < 5.
HeaderFields parse_header(std::span<const std::uint8_t> bytes);
HeaderFields parse_header_hex(std::string_view hex);

/// Minimal well-formed packet carrying `fields`: a 20-byte IPv4 header with a
/// valid checksum followed by an 8-byte UDP/ICMP header or a 20-byte TCP
/// header. Ports of non-port protocols must be 0.
Bytes serialize_header(const HeaderFields& fields);

/// Even-length hex, either case. Throws ParseError otherwise.
Bytes decode_hex(std::string_view hex);
/// Lowercase hex.
std::string encode_hex(std::span<const std::uint8_t> bytes);

}  // namespace farsec
