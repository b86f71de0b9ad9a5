#include "farsec/api_model.hpp"

#include "farsec/error.hpp"
#include "farsec/event_log.hpp"

namespace farsec {

using nlohmann::json;

namespace {

json rule_json(const SlaRule& r) {
  return json{{"protocol", to_string(r.protocol)},
              {"source", r.source.to_string()},
              {"destination", r.destination.to_string()},
              {"dscp", r.dscp},
              {"src_port_min", r.source_ports.min},
              {"src_port_max", r.source_ports.max},
              {"dst_port_min", r.destination_ports.min},
              {"dst_port_max", r.destination_ports.max},
              {"min_sec", r.min_security}};
}

/// Appends or replaces in `arr` the element for which `same` holds.
template <typename Same>
void upsert(json& arr, const json& item, Same same) {
  for (auto& existing : arr) {
    if (same(existing, item)) {
      existing = item;
      return;
    }
  }
  arr.push_back(item);
}

/// Emits one change per element of `after` that is new or differs from the
/// element at the same position of `before`. Collections only grow, and
/// only at the end.
void diff_list(const json& before, const json& after, const char* type, const char* key,
               json& changes) {
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (i >= before.size() || before[i] != after[i]) {
      changes.push_back(json{{"type", type}, {key, after[i]}});
    }
  }
}

}  // namespace

json flow_json(const FlowRecord& f) {
  return json{{"id", f.id},
              {"origin", f.origin},
              {"destination", f.destination},
              {"header", encode_hex(f.header)},
              {"requirement", f.requirement},
              {"admitted", f.admitted()},
              {"path", f.admitted() ? json(f.path) : json(nullptr)}};
}

json snapshot_json(const DataplaneState& state, std::uint64_t version) {
  json nodes = json::array();
  for (const auto& d : state.devices()) {
    nodes.push_back(json{{"id", d.id}, {"up", d.up}});
  }
  json links = json::array();
  for (const auto& l : state.links()) {
    links.push_back(json{{"src", l.src}, {"dst", l.dst}, {"level", l.level}, {"up", l.up}});
  }
  json hosts = json::array();
  for (const auto& h : state.hosts()) {
    hosts.push_back(
        json{{"host", h.host}, {"device", h.device}, {"address", h.address.to_string()}});
  }
  json sla = json::array();
  for (const auto& r : state.sla().rules) {
    sla.push_back(rule_json(r));
  }
  json flows = json::array();
  for (const auto& f : state.flows()) {
    flows.push_back(flow_json(f));
  }
  return json{{"version", version}, {"nodes", std::move(nodes)}, {"links", std::move(links)},
              {"hosts", std::move(hosts)},  {"sla", std::move(sla)},     {"flows", std::move(flows)}};
}

json make_delta(const json& before, const json& after, std::span<const RuleChange> changes,
                std::uint64_t tick) {
  json out = json::array();
  diff_list(before.at("nodes"), after.at("nodes"), "node", "node", out);
  diff_list(before.at("links"), after.at("links"), "link", "link", out);
  if (before.at("sla") != after.at("sla")) {
    out.push_back(json{{"type", "sla"}, {"rules", after.at("sla")}});
  }
  diff_list(before.at("flows"), after.at("flows"), "flow", "flow", out);
  if (!changes.empty()) {
    json rules = json::array();
    for (const auto& c : changes) {
      rules.push_back(rule_change_to_json(tick, c));
    }
    out.push_back(json{{"type", "rules"}, {"changes", std::move(rules)}});
  }
  return json{{"version", after.at("version")}, {"changes", std::move(out)}};
}

json apply_delta(json snapshot, const json& delta) {
  for (const auto& change : delta.at("changes")) {
    const auto type = change.at("type").get<std::string>();
    if (type == "node") {
      upsert(snapshot["nodes"], change.at("node"),
             [](const json& a, const json& b) { return a.at("id") == b.at("id"); });
    } else if (type == "link") {
      upsert(snapshot["links"], change.at("link"), [](const json& a, const json& b) {
        return a.at("src") == b.at("src") && a.at("dst") == b.at("dst");
      });
    } else if (type == "sla") {
      snapshot["sla"] = change.at("rules");
    } else if (type == "flow") {
      upsert(snapshot["flows"], change.at("flow"),
             [](const json& a, const json& b) { return a.at("id") == b.at("id"); });
    } else if (type != "rules") {
      throw ParseError("unknown delta change type '" + type + "'");
    }
  }
  snapshot["version"] = delta.at("version");
  return snapshot;
}

}  // namespace farsec
