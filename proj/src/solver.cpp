#include "farsec/solver.hpp"

#include <cassert>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace {

constexpr std::string_view kRequestsHeader = "FlowID,Source,Destination,Header";
constexpr std::string_view kMappingHeader = "FlowID,Admitted,Path";

}  // namespace

MinSecurityFn sla_min_security(SlaPolicy policy) {
  return [policy = std::move(policy)](std::span<const std::uint8_t> header) {
    return min_security(policy, parse_header(header));
  };
}

Mapping::Mapping(std::vector<Assignment> assignments) : assignments_(std::move(assignments)) {}

const Assignment* Mapping::find(std::string_view flow_id) const {
  for (const auto& a : assignments_) {
    if (a.flow_id == flow_id) {
      return &a;
    }
  }
  return nullptr;
}

std::size_t Mapping::admitted_count() const noexcept {
  std::size_t count = 0;
  for (const auto& a : assignments_) {
    count += a.admitted() ? 1 : 0;
  }
  return count;
}

BottleneckMatrix::BottleneckMatrix(const SecureNetwork& net, const WidestPaths& widest)
    : n_(widest.size()), levels_(n_ * n_, kUnbounded) {
  for (NodeIndex i = 0; i < n_; ++i) {
    for (NodeIndex j = 0; j < n_; ++j) {
      auto& level = levels_[i * n_ + j];
      for (const auto& e : widest.path(i, j).edges) {
        const auto s = net.level(e);
        if (s < level) {
          level = s;
        }
      }
      assert(widest.path(i, j).empty() || level == widest.width(i, j));
    }
  }
}

Mapping solve(const SecureNetwork& net, std::span<const Flow> flows, const MinSecurityFn& min_sec) {
  return solve(net, all_pairs_widest(net), flows, min_sec);
}

Mapping solve(const SecureNetwork& net, const WidestPaths& widest, std::span<const Flow> flows,
              const MinSecurityFn& min_sec) {
  return solve(net, widest, BottleneckMatrix(net, widest), flows, min_sec);
}

Mapping solve(const SecureNetwork& net, const WidestPaths& widest,
              const BottleneckMatrix& bottleneck, std::span<const Flow> flows,
              const MinSecurityFn& min_sec) {
  std::vector<Assignment> out;
  out.reserve(flows.size());
  std::unordered_set<std::string> ids;
  ids.reserve(flows.size());

  // Validate everything before computing anything.
  for (const auto& f : flows) {
    if (!ids.insert(f.id).second) {
      throw ValidationError("duplicate flow id '" + f.id + "'");
    }
    const auto o = net.index_of(f.origin);
    const auto d = net.index_of(f.destination);
    if (o == d) {
      throw ValidationError("flow '" + f.id + "' starts and ends at '" + f.origin + "'");
    }
    if (f.header.empty()) {
      throw ValidationError("flow '" + f.id + "' has an empty header");
    }
    out.push_back(Assignment{f.id, o, d, 0, {}});
  }

  for (std::size_t k = 0; k < flows.size(); ++k) {
    auto& a = out[k];
    a.requirement = min_sec(flows[k].header);
    const auto& path = widest.path(a.origin, a.destination);
    if (!path.empty() && a.requirement <= bottleneck.at(a.origin, a.destination)) {
      a.path = path;
    }
  }
  return Mapping(std::move(out));
}

std::vector<Flow> parse_requests(std::string_view text) {
  const auto rows = csv::lines(text, "requests");
  if (rows.empty() || rows.front() != kRequestsHeader) {
    throw ParseError("requests: header must be '" + std::string(kRequestsHeader) + "'");
  }
  std::vector<Flow> flows;
  flows.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto at = csv::where("requests", i + 1);
    const auto f = csv::split(rows[i]);
    if (f.size() != 4) {
      throw ParseError(at + ": expected 4 fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty() || f[2].empty()) {
      throw ParseError(at + ": empty field");
    }
    for (const char c : f[3]) {
      if (c >= 'A' && c <= 'F') {
        throw ParseError(at + ": Header must be lowercase hex");
      }
    }
    Bytes header;
    try {
      header = decode_hex(f[3]);
    } catch (const ParseError& e) {
      throw ParseError(at + " Header: " + e.what());
    }
    if (header.empty()) {
      throw ParseError(at + ": empty Header");
    }
    flows.push_back(Flow{std::string(f[0]), std::string(f[1]), std::string(f[2]), std::move(header)});
  }
  return flows;
}

std::vector<Flow> read_requests(std::istream& in) { return parse_requests(csv::slurp(in)); }

std::string format_requests(std::span<const Flow> flows) {
  std::ostringstream out;
  out << kRequestsHeader << '\n';
  for (const auto& f : flows) {
    out << f.id << ',' << f.origin << ',' << f.destination << ',' << encode_hex(f.header) << '\n';
  }
  return out.str();
}

std::string format_mapping(const SecureNetwork& net, const Mapping& mapping) {
  std::ostringstream out;
  out << kMappingHeader << '\n';
  for (const auto& a : mapping.assignments()) {
    out << a.flow_id << ',' << (a.admitted() ? 1 : 0) << ',';
    if (!a.admitted()) {
      out << '-';
    } else {
      const auto nodes = a.path.nodes();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << (i ? "|" : "") << net.name(nodes[i]);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace farsec
