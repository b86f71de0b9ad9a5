#include "farsec/event_log.hpp"

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ParseError(std::string("event payload lacks '") + name + "'");
  }
  return obj.at(name);
}

std::string text(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_string()) {
    throw ParseError(std::string("event field '") + name + "' must be a string");
  }
  return v.get<std::string>();
}

SecurityLevel level(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("event field '") + name + "' must be an integer");
  }
  return v.get<SecurityLevel>();
}

}  // namespace

json event_to_json(const NetworkEvent& event) {
  json payload = std::visit(
      overloaded{
          [](const events::DeviceUp& e) { return json{{"device", e.device}}; },
          [](const events::DeviceDown& e) { return json{{"device", e.device}}; },
          [](const events::LinkUp& e) {
            json j{{"src", e.src}, {"dst", e.dst}};
            if (e.level) {
              j["level"] = *e.level;
            }
            return j;
          },
          [](const events::LinkDown& e) { return json{{"src", e.src}, {"dst", e.dst}}; },
          [](const events::LinkSecurityChanged& e) {
            return json{{"src", e.src}, {"dst", e.dst}, {"level", e.level}};
          },
          [](const events::PacketIn& e) {
            json j{{"header", encode_hex(e.header)}, {"ingress", e.ingress}};
            if (e.flow_id) {
              j["flow_id"] = *e.flow_id;
            }
            return j;
          },
          [](const events::SlaUpdated& e) { return json{{"csv", format_sla(e.policy)}}; },
          [](const events::FlowRequested& e) {
            return json{{"flow_id", e.flow.id},
                        {"source", e.flow.origin},
                        {"destination", e.flow.destination},
                        {"header", encode_hex(e.flow.header)}};
          },
      },
      event.payload);
  return json{{"kind", kind_name(event.payload)}, {"payload", std::move(payload)},
              {"tick", event.tick}};
}

NetworkEvent event_from_json(const json& j) {
  if (!j.is_object()) {
    throw ParseError("event must be a JSON object");
  }
  const auto kind = text(j, "kind");
  const auto& p = field(j, "payload");
  const auto& tick = field(j, "tick");
  if (!tick.is_number_unsigned() && !(tick.is_number_integer() && tick.get<std::int64_t>() >= 0)) {
    throw ParseError("event tick must be a nonnegative integer");
  }

  NetworkEvent ev;
  ev.tick = tick.get<std::uint64_t>();
  if (kind == "DeviceUp") {
    ev.payload = events::DeviceUp{text(p, "device")};
  } else if (kind == "DeviceDown") {
    ev.payload = events::DeviceDown{text(p, "device")};
  } else if (kind == "LinkUp") {
    events::LinkUp e{text(p, "src"), text(p, "dst"), std::nullopt};
    if (p.contains("level")) {
      e.level = level(p, "level");
    }
    ev.payload = std::move(e);
  } else if (kind == "LinkDown") {
    ev.payload = events::LinkDown{text(p, "src"), text(p, "dst")};
  } else if (kind == "LinkSecurityChanged") {
    ev.payload = events::LinkSecurityChanged{text(p, "src"), text(p, "dst"), level(p, "level")};
  } else if (kind == "PacketIn") {
    events::PacketIn e{decode_hex(text(p, "header")), text(p, "ingress"), std::nullopt};
    if (p.contains("flow_id")) {
      e.flow_id = text(p, "flow_id");
    }
    ev.payload = std::move(e);
  } else if (kind == "SlaUpdated") {
    ev.payload = events::SlaUpdated{parse_sla(text(p, "csv"))};
  } else if (kind == "FlowRequested") {
    ev.payload = events::FlowRequested{Flow{text(p, "flow_id"), text(p, "source"),
                                            text(p, "destination"), decode_hex(text(p, "header"))}};
  } else {
    throw ParseError("unknown event kind '" + kind + "'");
  }
  return ev;
}

json match_to_json(const HeaderFields& m) {
  return json{{"protocol", to_string(m.protocol)},
              {"src", m.source.to_string()},
              {"dst", m.destination.to_string()},
              {"dscp", m.dscp},
              {"src_port", m.source_port},
              {"dst_port", m.destination_port}};
}

json rule_change_to_json(std::uint64_t tick, const RuleChange& change) {
  return json{{"kind", to_string(change.op)},
              {"payload",
               {{"device", change.rule.device},
                {"next", change.rule.next},
                {"flow_id", change.rule.flow_id},
                {"match", match_to_json(change.rule.match)}}},
              {"tick", tick}};
}

std::vector<NetworkEvent> parse_event_log(std::string_view log) {
  std::vector<NetworkEvent> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < log.size()) {
    const auto nl = log.find('\n', pos);
    const auto end = nl == std::string_view::npos ? log.size() : nl;
    const auto line = log.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(csv::where("event log", line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(csv::where("event log", line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_event_log(const std::vector<NetworkEvent>& events) {
  std::string out;
  for (const auto& ev : events) {
    out += event_to_json(ev).dump();
    out += '\n';
  }
  return out;
}

}  // namespace farsec
