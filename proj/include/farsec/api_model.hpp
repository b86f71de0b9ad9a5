#pragma once

// Canonical JSON views of the controller state.
//
// Snapshot:
//   {"flows":[{"admitted","destination","header","id","origin","path","requirement"}],
//    "hosts":[{"address","device","host"}],
//    "links":[{"dst","level","src","up"}],
//    "nodes":[{"id","up"}],
//    "sla":[{"destination","dscp","dst_port_max","dst_port_min","min_sec","protocol",
//            "source","src_port_max","src_port_min"}],
//    "version":N}
//
// Delta (one per applied mutation, in version order):
//   {"version":N,"changes":[...]} where each change is one of
//     {"type":"node","node":{...}}         upsert by id
//     {"type":"link","link":{...}}         upsert by (src,dst)
//     {"type":"sla","rules":[...]}         replace
//     {"type":"flow","flow":{...}}         upsert by id
//     {"type":"rules","changes":[...]}     rule diff, informational
//   and an optional "error" string when the mutation was refused.
//
// Keys are sorted and levels are integers, so dump() is a canonical form.

#include <cstdint>
#include <span>

#include <json.hpp>

#include "farsec/orchestrator.hpp"

namespace farsec {

nlohmann::json snapshot_json(const DataplaneState& state, std::uint64_t version);
nlohmann::json flow_json(const FlowRecord& flow);

nlohmann::json make_delta(const nlohmann::json& before, const nlohmann::json& after,
                          std::span<const RuleChange> changes, std::uint64_t tick);

/// Replays one delta onto a snapshot.
nlohmann::json apply_delta(nlohmann::json snapshot, const nlohmann::json& delta);

}  // namespace farsec
