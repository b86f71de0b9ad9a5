#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "farsec/header.hpp"
#include "farsec/instance_gen.hpp"
#include "farsec/secure_network.hpp"
#include "farsec/sla.hpp"
#include "farsec/solver.hpp"
#include "farsec/widest_paths.hpp"

namespace farsec {

namespace events {

struct DeviceUp {
  NodeId device;
};
struct DeviceDown {
  NodeId device;
};
/// Brings a known link up (optionally with a new level) or adds a new one,
/// in which case `level` is required.
struct LinkUp {
  NodeId src;
  NodeId dst;
  std::optional<SecurityLevel> level;
};
struct LinkDown {
  NodeId src;
  NodeId dst;
};
struct LinkSecurityChanged {
  NodeId src;
  NodeId dst;
  SecurityLevel level = 0;
};
/// A device saw a packet it has no rule for. Endpoints are inferred from the
/// host table by source and destination address.
struct PacketIn {
  Bytes header;
  NodeId ingress;
  std::optional<std::string> flow_id;
};
struct SlaUpdated {
  SlaPolicy policy;
};
/// A flow with explicit endpoint devices, as listed in a requests file.
struct FlowRequested {
  Flow flow;
};

}  // namespace events

using EventPayload =
    std::variant<events::DeviceUp, events::DeviceDown, events::LinkUp, events::LinkDown,
                 events::LinkSecurityChanged, events::PacketIn, events::SlaUpdated,
                 events::FlowRequested>;

struct NetworkEvent {
  std::uint64_t tick = 0;
  EventPayload payload;
};

std::string_view kind_name(const EventPayload& payload);

struct DeviceState {
  NodeId id;
  bool up = true;
};

struct LinkState {
  NodeId src;
  NodeId dst;
  SecurityLevel level = 0;
  bool up = true;
};

struct FlowRecord {
  std::string id;
  Bytes header;
  HeaderFields match;
  NodeId origin;
  NodeId destination;
  SecurityLevel requirement = 0;
  std::vector<NodeId> path;  // empty while rejected

  [[nodiscard]] bool admitted() const noexcept { return !path.empty(); }
};

/// Forward packets matching `match` at `device` over the link (device, next).
struct ForwardingRule {
  NodeId device;
  NodeId next;
  HeaderFields match;
  std::string flow_id;

  friend bool operator==(const ForwardingRule&, const ForwardingRule&) = default;
};

struct RuleChange {
  enum class Op { Install, Withdraw };
  Op op = Op::Install;
  ForwardingRule rule;

  friend bool operator==(const RuleChange&, const RuleChange&) = default;
};

std::string_view to_string(RuleChange::Op op);

enum class ReroutePolicy {
  /// Admitted flows keep their path while it stays feasible.
  KeepFeasible,
  /// Every topology or SLA event moves every flow to its current widest path.
  AlwaysWidest,
};

struct OrchestratorOptions {
  ReroutePolicy reroute = ReroutePolicy::KeepFeasible;
};

/// Active topology with its widest paths, recomputed after every topology
/// change and shared between state copies.
struct Routing {
  explicit Routing(SecureNetwork net);

  SecureNetwork network;
  WidestPaths widest;
  BottleneckMatrix bottleneck;
};

/// Controller view of the network plus the installed rule tables. A value
/// type: transitions copy it, so older snapshots stay valid.
class DataplaneState {
 public:
  using RuleTable = std::map<HeaderFields, ForwardingRule>;

  DataplaneState();

  [[nodiscard]] std::uint64_t version() const noexcept { return version_; }
  [[nodiscard]] std::uint64_t tick() const noexcept { return tick_; }

  [[nodiscard]] const std::vector<DeviceState>& devices() const noexcept { return devices_; }
  [[nodiscard]] const std::vector<LinkState>& links() const noexcept { return links_; }
  [[nodiscard]] const std::vector<HostAttachment>& hosts() const noexcept { return hosts_; }
  [[nodiscard]] const SlaPolicy& sla() const noexcept { return sla_; }
  /// In admission order.
  [[nodiscard]] const std::vector<FlowRecord>& flows() const noexcept { return flows_; }
  /// Per-device rule tables keyed by match.
  [[nodiscard]] const std::map<NodeId, RuleTable>& tables() const noexcept { return tables_; }

  /// All devices as nodes; links that are up between devices that are up.
  [[nodiscard]] const SecureNetwork& active_network() const noexcept { return routing_->network; }
  [[nodiscard]] const Routing& routing() const noexcept { return *routing_; }

  [[nodiscard]] const DeviceState* find_device(std::string_view id) const;
  [[nodiscard]] const LinkState* find_link(std::string_view src, std::string_view dst) const;
  [[nodiscard]] const FlowRecord* find_flow(std::string_view id) const;
  [[nodiscard]] const FlowRecord* find_flow(const HeaderFields& match) const;
  [[nodiscard]] const HostAttachment* find_host(std::string_view name) const;
  [[nodiscard]] const HostAttachment* find_host(Ipv4Address address) const;
  [[nodiscard]] const ForwardingRule* lookup(std::string_view device,
                                             const HeaderFields& match) const;
  [[nodiscard]] std::size_t rule_count() const noexcept;

 private:
  friend class StateEditor;
  friend DataplaneState initial_state(const SecureNetwork&, std::vector<HostAttachment>,
                                      SlaPolicy);

  std::uint64_t version_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t next_flow_number_ = 1;

  std::vector<DeviceState> devices_;
  std::vector<LinkState> links_;
  std::vector<HostAttachment> hosts_;
  SlaPolicy sla_;
  std::vector<FlowRecord> flows_;
  std::map<NodeId, RuleTable> tables_;

  std::map<std::string, std::size_t, std::less<>> flow_by_id_;
  std::map<HeaderFields, std::size_t> flow_by_match_;
  std::map<std::pair<NodeId, NodeId>, std::size_t> link_index_;
  std::shared_ptr<const Routing> routing_;
};

/// Starting state: every node of `topology` is an up device and every link is
/// up. Hosts must attach to known devices with distinct names and addresses.
DataplaneState initial_state(const SecureNetwork& topology, std::vector<HostAttachment> hosts,
                             SlaPolicy sla);

struct Transition {
  DataplaneState state;
  std::vector<RuleChange> changes;  // withdrawals first, then installs
};

/// Applies one event. Topology and SLA events re-solve every known flow;
/// PacketIn and FlowRequested admit or reject one new flow. Throws
/// ParseError, NotFoundError or ValidationError for events that do not fit
/// the state; the input state is never modified.
Transition apply_event(const DataplaneState& state, const NetworkEvent& event,
                       const OrchestratorOptions& options = {});

struct TraceResult {
  enum class Status { Delivered, Dropped, Loop };
  Status status = Status::Dropped;
  std::vector<NodeId> hops;
  /// Set when a device without a matching rule reports the packet.
  std::optional<NetworkEvent> packet_in;
};

std::string_view to_string(TraceResult::Status status);

/// Walks the rule tables from `ingress`. The packet is delivered when it
/// reaches the destination device of its flow (or of the host owning the
/// destination address), dropped at the first device with no matching rule,
/// and reported as a loop after more hops than there are devices.
TraceResult inject_packet(const DataplaneState& state, std::span<const std::uint8_t> header,
                          std::string_view ingress);

/// Invariant violations of `state`, empty when healthy: admitted paths must be
/// simple, active and at least as secure as their flow requires, and the rule
/// tables must hold exactly one rule per hop of every admitted path.
std::vector<std::string> check_dataplane(const DataplaneState& state);

/// Single-writer event loop over DataplaneState.
class Orchestrator {
 public:
  explicit Orchestrator(DataplaneState initial, OrchestratorOptions options = {});

  std::vector<RuleChange> handle(const NetworkEvent& event);
  [[nodiscard]] const DataplaneState& state() const noexcept { return state_; }
  [[nodiscard]] const OrchestratorOptions& options() const noexcept { return options_; }

 private:
  DataplaneState state_;
  OrchestratorOptions options_;
};

}  // namespace farsec
