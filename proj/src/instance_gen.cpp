#include "farsec/instance_gen.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace {

constexpr std::string_view kHostsHeader = "Host,Switch,Address";
constexpr std::uint16_t kRequirementPortBase = 5000;

/// Uniform integer in [lo, hi] by rejection; unlike
/// std::uniform_int_distribution the stream is identical on every standard
/// library.
std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(rng());
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

void check(const LevelRange& r, const char* name) {
  if (r.lo < 0 || r.hi < r.lo) {
    throw ValidationError(std::string(name) + " range must satisfy 0 <= lo <= hi");
  }
  if (r.hi >= static_cast<SecurityLevel>(65535 - kRequirementPortBase)) {
    throw ValidationError(std::string(name) + " range too large to encode in a port");
  }
}

Ipv4Address host_address(int node_number) {
  return Ipv4Address((10u << 24) | (static_cast<std::uint32_t>(node_number >> 8) << 16) |
                     (static_cast<std::uint32_t>(node_number & 0xff) << 8) | 1u);
}

}  // namespace

std::string instance_stem(const GenConfig& cfg) {
  return "instance-n" + std::to_string(cfg.size) + "-seed" + std::to_string(cfg.seed);
}

GeneratedInstance generate(const GenConfig& cfg) {
  if (cfg.size < 2) {
    throw ValidationError("instance size must be at least 2");
  }
  if (cfg.size > 65535) {
    throw ValidationError("instance size must be at most 65535");
  }
  check(cfg.root_to_hub, "root_to_hub");
  check(cfg.hub_to_leaf, "hub_to_leaf");
  check(cfg.leaf_to_leaf, "leaf_to_leaf");
  if (cfg.flow_multiplier < 0) {
    throw ValidationError("flow multiplier must be nonnegative");
  }

  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.size;
  const int hubs = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n - 1))));
  const int leaves = n - 1 - hubs;

  std::vector<NodeId> nodes;
  nodes.reserve(n);
  for (int i = 1; i <= n; ++i) {
    nodes.push_back("s" + std::to_string(i));
  }
  const auto hub_node = [&](int h) { return 1 + h; };
  const auto leaf_node = [&](int l) { return 1 + hubs + l; };

  std::vector<Link> links;
  const auto adjacency = [&](int a, int b, const LevelRange& range) {
    links.push_back(Link{nodes[a], nodes[b], uniform(rng, range.lo, range.hi)});
    links.push_back(Link{nodes[b], nodes[a], uniform(rng, range.lo, range.hi)});
  };

  for (int h = 0; h < hubs; ++h) {
    adjacency(0, hub_node(h), cfg.root_to_hub);
  }
  std::vector<std::vector<int>> groups(hubs);
  for (int l = 0; l < leaves; ++l) {
    groups[l % hubs].push_back(leaf_node(l));
    adjacency(hub_node(l % hubs), leaf_node(l), cfg.hub_to_leaf);
  }
  for (int h = 0; h < hubs; ++h) {
    const auto& g = groups[h];
    if (h == 0) {
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = a + 1; b < g.size(); ++b) {
          adjacency(g[a], g[b], cfg.leaf_to_leaf);
        }
      }
    } else {
      for (std::size_t a = 0; a + 1 < g.size(); ++a) {
        adjacency(g[a], g[a + 1], cfg.leaf_to_leaf);
      }
    }
  }

  GeneratedInstance inst;
  inst.config = cfg;
  inst.network = build_network(nodes, links);

  for (int i = 1; i <= n; ++i) {
    inst.hosts.push_back(HostAttachment{"h" + std::to_string(i), nodes[i - 1], host_address(i)});
  }

  const SecurityLevel req_lo =
      std::min({cfg.root_to_hub.lo, cfg.hub_to_leaf.lo, cfg.leaf_to_leaf.lo});
  const SecurityLevel req_hi =
      std::max({cfg.root_to_hub.hi, cfg.hub_to_leaf.hi, cfg.leaf_to_leaf.hi});
  for (SecurityLevel r = req_lo; r <= req_hi; ++r) {
    SlaRule rule;
    rule.protocol = IpProtocol::Udp;
    rule.source = Ipv4Prefix(Ipv4Address(0), 0);
    rule.destination = Ipv4Prefix(Ipv4Address(0), 0);
    const auto port = static_cast<std::uint16_t>(kRequirementPortBase + r);
    rule.destination_ports = PortRange{port, port};
    rule.min_security = r;
    inst.sla.rules.push_back(rule);
  }

  SecurityLevel level_sum = 0;
  for (const auto& link : inst.network.links()) {
    level_sum += link.level;
  }
  const auto flow_count = static_cast<std::size_t>(cfg.flow_multiplier * level_sum);
  inst.flows.reserve(flow_count);
  for (std::size_t k = 0; k < flow_count; ++k) {
    const auto o = static_cast<int>(uniform(rng, 0, n - 1));
    auto d = static_cast<int>(uniform(rng, 0, n - 2));
    if (d >= o) {
      ++d;
    }
    const auto requirement = uniform(rng, req_lo, req_hi);

    HeaderFields h;
    h.protocol = IpProtocol::Udp;
    h.source = host_address(o + 1);
    h.destination = host_address(d + 1);
    h.source_port = static_cast<std::uint16_t>(1024 + k % 64512);
    h.destination_port = static_cast<std::uint16_t>(kRequirementPortBase + requirement);

    auto id = std::to_string(k + 1);
    inst.requirements.emplace(id, requirement);
    inst.flows.push_back(Flow{std::move(id), nodes[o], nodes[d], serialize_header(h)});
  }
  return inst;
}

std::string format_hosts(const std::vector<HostAttachment>& hosts) {
  std::ostringstream out;
  out << kHostsHeader << '\n';
  for (const auto& h : hosts) {
    out << h.host << ',' << h.device << ',' << h.address.to_string() << '\n';
  }
  return out.str();
}

std::vector<HostAttachment> parse_hosts(std::string_view text) {
  const auto rows = csv::lines(text, "hosts");
  if (rows.empty() || rows.front() != kHostsHeader) {
    throw ParseError("hosts: header must be '" + std::string(kHostsHeader) + "'");
  }
  std::vector<HostAttachment> hosts;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto at = csv::where("hosts", i + 1);
    const auto f = csv::split(rows[i]);
    if (f.size() != 3 || f[0].empty() || f[1].empty()) {
      throw ParseError(at + ": expected Host,Switch,Address");
    }
    hosts.push_back(HostAttachment{std::string(f[0]), std::string(f[1]), Ipv4Address::parse(f[2])});
  }
  return hosts;
}

std::vector<std::filesystem::path> write_instance(const GeneratedInstance& inst,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto stem = instance_stem(inst.config);
  const std::pair<const char*, std::string> files[] = {
      {".resources.csv", format_resources(inst.network)},
      {".requests.csv", format_requests(inst.flows)},
      {".sla.csv", format_sla(inst.sla)},
      {".hosts.csv", format_hosts(inst.hosts)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [suffix, body] : files) {
    auto path = dir / (stem + suffix);
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) {
      throw Error("cannot write " + path.string());
    }
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace farsec
