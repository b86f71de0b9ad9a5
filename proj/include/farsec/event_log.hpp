#pragma once

// JSON-lines encoding of orchestrator events and rule changes.
//
// Event line:  {"kind":"LinkSecurityChanged","payload":{"dst":"s2","level":2,"src":"s1"},"tick":3}
// Rule line:   {"kind":"install","payload":{"device":"s1","flow_id":"f1","match":{...},
//               "next":"s2"},"tick":3}
//
// Payloads per event kind:
//   DeviceUp / DeviceDown      {"device"}
//   LinkUp                     {"src","dst"[,"level"]}
//   LinkDown                   {"src","dst"}
//   LinkSecurityChanged        {"src","dst","level"}
//   PacketIn                   {"header" (hex),"ingress"[,"flow_id"]}
//   SlaUpdated                 {"csv" (SLA file contents)}
//   FlowRequested              {"flow_id","source","destination","header" (hex)}

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "farsec/orchestrator.hpp"

namespace farsec {

nlohmann::json event_to_json(const NetworkEvent& event);
/// Throws ParseError on unknown kinds or missing/mistyped payload fields.
NetworkEvent event_from_json(const nlohmann::json& j);

nlohmann::json match_to_json(const HeaderFields& match);
nlohmann::json rule_change_to_json(std::uint64_t tick, const RuleChange& change);

/// One event per non-empty line.
std::vector<NetworkEvent> parse_event_log(std::string_view text);
std::string format_event_log(const std::vector<NetworkEvent>& events);

}  // namespace farsec
