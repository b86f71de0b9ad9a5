#include "farsec/header.hpp"

#include <array>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace {

constexpr std::size_t kIpv4MinHeader = 20;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void put_u16(Bytes& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v >> 8);
  b[at + 1] = static_cast<std::uint8_t>(v & 0xff);
}

void put_u32(Bytes& b, std::size_t at, std::uint32_t v) {
  put_u16(b, at, static_cast<std::uint16_t>(v >> 16));
  put_u16(b, at + 2, static_cast<std::uint16_t>(v & 0xffff));
}

std::uint16_t ones_complement_checksum(std::span<const std::uint8_t> b) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < b.size(); i += 2) {
    sum += read_u16(b, i);
  }
  if (b.size() % 2 != 0) {
    sum += std::uint32_t{b.back()} << 8;
  }
  while (sum >> 16) {
    sum = (sum & 0xffff) + (sum >> 16);
  }
  return static_cast<std::uint16_t>(~sum);
}

}  // namespace

std::string to_string(IpProtocol protocol) {
  switch (protocol) {
    case IpProtocol::Icmp:
      return "ICMP";
    case IpProtocol::Tcp:
      return "TCP";
    case IpProtocol::Udp:
      return "UDP";
  }
  return std::to_string(static_cast<int>(protocol));
}

bool carries_ports(IpProtocol protocol) noexcept {
  return protocol == IpProtocol::Tcp || protocol == IpProtocol::Udp;
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
  const auto parts = csv::split(text, '.');
  if (parts.size() != 4) {
    throw ParseError("bad IPv4 address '" + std::string(text) + "'");
  }
  std::uint32_t value = 0;
  for (const auto part : parts) {
    if (part.size() > 1 && part.front() == '0') {
      throw ParseError("bad IPv4 address '" + std::string(text) + "'");
    }
    const auto octet = csv::parse_int<int>(part, "IPv4 address '" + std::string(text) + "'");
    if (octet < 0 || octet > 255) {
      throw ParseError("bad IPv4 address '" + std::string(text) + "'");
    }
    value = (value << 8) | static_cast<std::uint32_t>(octet);
  }
  return Ipv4Address(value);
}

std::string Ipv4Address::to_string() const {
  return std::to_string(value_ >> 24) + "." + std::to_string((value_ >> 16) & 0xff) + "." +
         std::to_string((value_ >> 8) & 0xff) + "." + std::to_string(value_ & 0xff);
}

Ipv4Prefix::Ipv4Prefix(Ipv4Address address, int length) : address_(address), length_(length) {
  if (length < 0 || length > 32) {
    throw ValidationError("prefix length " + std::to_string(length) + " outside 0-32");
  }
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw ParseError("bad CIDR '" + std::string(text) + "': missing prefix length");
  }
  const auto address = Ipv4Address::parse(text.substr(0, slash));
  const auto length_text = text.substr(slash + 1);
  if (length_text.size() > 1 && length_text.front() == '0') {
    throw ParseError("bad CIDR '" + std::string(text) + "'");
  }
  const auto length = csv::parse_int<int>(length_text, "CIDR '" + std::string(text) + "'");
  if (length < 0 || length > 32) {
    throw ParseError("bad CIDR '" + std::string(text) + "': prefix length outside 0-32");
  }
  return {address, length};
}

bool Ipv4Prefix::contains(Ipv4Address addr) const noexcept {
  if (length_ == 0) {
    return true;
  }
  const std::uint32_t mask = ~std::uint32_t{0} << (32 - length_);
  return (addr.value() & mask) == (address_.value() & mask);
}

std::string Ipv4Prefix::to_string() const {
  return address_.to_string() + "/" + std::to_string(length_);
}

HeaderFields parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kIpv4MinHeader) {
    throw ParseError("truncated header: " + std::to_string(bytes.size()) +
                     " bytes, an IPv4 header needs at least 20");
  }
  const int version = bytes[0] >> 4;
  if (version != 4) {
    throw ParseError("unsupported IP version " + std::to_string(version));
  }
  const std::size_t ihl = (bytes[0] & 0x0f) * 4u;
  if (ihl < kIpv4MinHeader) {
    throw ParseError("bad IHL " + std::to_string(ihl / 4));
  }
  if (bytes.size() < ihl) {
    throw ParseError("truncated header: IHL says " + std::to_string(ihl) + " bytes, got " +
                     std::to_string(bytes.size()));
  }

  HeaderFields f;
  f.dscp = static_cast<std::uint8_t>(bytes[1] >> 2);
  f.protocol = static_cast<IpProtocol>(bytes[9]);
  f.source = Ipv4Address(read_u32(bytes, 12));
  f.destination = Ipv4Address(read_u32(bytes, 16));
  if (carries_ports(f.protocol)) {
    if (bytes.size() < ihl + 4) {
      throw ParseError("truncated header: " + to_string(f.protocol) + " ports missing");
    }
    f.source_port = read_u16(bytes, ihl);
    f.destination_port = read_u16(bytes, ihl + 2);
  }
  return f;
}

HeaderFields parse_header_hex(std::string_view hex) { return parse_header(decode_hex(hex)); }

Bytes serialize_header(const HeaderFields& fields) {
  if (fields.dscp > 63) {
    throw ValidationError("DSCP " + std::to_string(fields.dscp) + " outside 0-63");
  }
  if (!carries_ports(fields.protocol) && (fields.source_port != 0 || fields.destination_port != 0)) {
    throw ValidationError(to_string(fields.protocol) + " headers carry no ports");
  }
  std::size_t l4 = 0;
  switch (fields.protocol) {
    case IpProtocol::Tcp:
      l4 = 20;
      break;
    case IpProtocol::Udp:
    case IpProtocol::Icmp:
      l4 = 8;
      break;
  }
  Bytes b(kIpv4MinHeader + l4, 0);
  b[0] = 0x45;
  b[1] = static_cast<std::uint8_t>(fields.dscp << 2);
  put_u16(b, 2, static_cast<std::uint16_t>(b.size()));
  b[8] = 64;  // TTL
  b[9] = static_cast<std::uint8_t>(fields.protocol);
  put_u32(b, 12, fields.source.value());
  put_u32(b, 16, fields.destination.value());
  put_u16(b, 10, ones_complement_checksum(std::span(b).first(kIpv4MinHeader)));

  switch (fields.protocol) {
    case IpProtocol::Udp:
      put_u16(b, 20, fields.source_port);
      put_u16(b, 22, fields.destination_port);
      put_u16(b, 24, 8);
      break;
    case IpProtocol::Tcp:
      put_u16(b, 20, fields.source_port);
      put_u16(b, 22, fields.destination_port);
      b[32] = 0x50;  // data offset 5
      b[33] = 0x02;  // SYN
      put_u16(b, 34, 0xffff);
      break;
    case IpProtocol::Icmp:
      b[20] = 8;  // echo request
      put_u16(b, 22, ones_complement_checksum(std::span(b).subspan(20)));
      break;
  }
  return b;
}

Bytes decode_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw ParseError("hex string has odd length " + std::to_string(hex.size()));
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw ParseError("non-hex character at offset " + std::to_string(hi < 0 ? 2 * i : 2 * i + 1));
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string encode_hex(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<char, 16> kDigits = {'0', '1', '2', '3', '4', '5', '6', '7',
                                                   '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const auto byte : bytes) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0x0f]);
  }
  return out;
}

}  // namespace farsec
