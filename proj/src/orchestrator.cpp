#include "farsec/orchestrator.hpp"

#include <algorithm>
#include <unordered_set>

#include "farsec/error.hpp"

namespace farsec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string link_name(std::string_view src, std::string_view dst) {
  return "(" + std::string(src) + "," + std::string(dst) + ")";
}

void check_level(SecurityLevel level, std::string_view src, std::string_view dst) {
  if (level < 0 || level == kUnbounded) {
    throw ValidationError("link " + link_name(src, dst) + ": invalid level " +
                          std::to_string(level));
  }
}

}  // namespace

std::string_view kind_name(const EventPayload& payload) {
  return std::visit(overloaded{
                        [](const events::DeviceUp&) { return "DeviceUp"; },
                        [](const events::DeviceDown&) { return "DeviceDown"; },
                        [](const events::LinkUp&) { return "LinkUp"; },
                        [](const events::LinkDown&) { return "LinkDown"; },
                        [](const events::LinkSecurityChanged&) { return "LinkSecurityChanged"; },
                        [](const events::PacketIn&) { return "PacketIn"; },
                        [](const events::SlaUpdated&) { return "SlaUpdated"; },
                        [](const events::FlowRequested&) { return "FlowRequested"; },
                    },
                    payload);
}

std::string_view to_string(RuleChange::Op op) {
  return op == RuleChange::Op::Install ? "install" : "withdraw";
}

std::string_view to_string(TraceResult::Status status) {
  switch (status) {
    case TraceResult::Status::Delivered:
      return "delivered";
    case TraceResult::Status::Dropped:
      return "dropped";
    case TraceResult::Status::Loop:
      return "loop";
  }
  return "?";
}

Routing::Routing(SecureNetwork net)
    : network(std::move(net)), widest(all_pairs_widest(network)), bottleneck(network, widest) {}

DataplaneState::DataplaneState() : routing_(std::make_shared<const Routing>(SecureNetwork{})) {}

const DeviceState* DataplaneState::find_device(std::string_view id) const {
  for (const auto& d : devices_) {
    if (d.id == id) {
      return &d;
    }
  }
  return nullptr;
}

const LinkState* DataplaneState::find_link(std::string_view src, std::string_view dst) const {
  const auto it = link_index_.find({NodeId(src), NodeId(dst)});
  return it == link_index_.end() ? nullptr : &links_[it->second];
}

const FlowRecord* DataplaneState::find_flow(std::string_view id) const {
  const auto it = flow_by_id_.find(id);
  return it == flow_by_id_.end() ? nullptr : &flows_[it->second];
}

const FlowRecord* DataplaneState::find_flow(const HeaderFields& match) const {
  const auto it = flow_by_match_.find(match);
  return it == flow_by_match_.end() ? nullptr : &flows_[it->second];
}

const HostAttachment* DataplaneState::find_host(std::string_view name) const {
  for (const auto& h : hosts_) {
    if (h.host == name) {
      return &h;
    }
  }
  return nullptr;
}

const HostAttachment* DataplaneState::find_host(Ipv4Address address) const {
  for (const auto& h : hosts_) {
    if (h.address == address) {
      return &h;
    }
  }
  return nullptr;
}

const ForwardingRule* DataplaneState::lookup(std::string_view device,
                                             const HeaderFields& match) const {
  const auto table = tables_.find(NodeId(device));
  if (table == tables_.end()) {
    return nullptr;
  }
  const auto rule = table->second.find(match);
  return rule == table->second.end() ? nullptr : &rule->second;
}

std::size_t DataplaneState::rule_count() const noexcept {
  std::size_t count = 0;
  for (const auto& [device, table] : tables_) {
    count += table.size();
  }
  return count;
}

DataplaneState initial_state(const SecureNetwork& topology, std::vector<HostAttachment> hosts,
                             SlaPolicy sla) {
  DataplaneState s;
  for (const auto& node : topology.nodes()) {
    s.devices_.push_back(DeviceState{node, true});
  }
  for (const auto& link : topology.links()) {
    s.link_index_.emplace(std::pair{link.src, link.dst}, s.links_.size());
    s.links_.push_back(LinkState{link.src, link.dst, link.level, true});
  }
  std::unordered_set<std::string> names;
  std::unordered_set<std::uint32_t> addresses;
  for (const auto& h : hosts) {
    if (h.host.empty()) {
      throw ValidationError("host names must be non-empty");
    }
    if (!topology.find(h.device)) {
      throw ValidationError("host '" + h.host + "' attaches to unknown device '" + h.device + "'");
    }
    if (!names.insert(h.host).second) {
      throw ValidationError("duplicate host '" + h.host + "'");
    }
    if (!addresses.insert(h.address.value()).second) {
      throw ValidationError("duplicate host address " + h.address.to_string());
    }
  }
  s.hosts_ = std::move(hosts);
  s.sla_ = std::move(sla);
  s.routing_ = std::make_shared<const Routing>(topology);
  return s;
}

/// Applies events to a state in place. Every handler validates before it
/// mutates, so a throwing event leaves the state untouched.
class StateEditor {
 public:
  StateEditor(DataplaneState& state, const OrchestratorOptions& options)
      : s_(state), options_(options) {}

  std::vector<RuleChange> apply(const NetworkEvent& ev) {
    if (ev.tick < s_.tick_) {
      throw ValidationError("event tick " + std::to_string(ev.tick) + " precedes tick " +
                            std::to_string(s_.tick_));
    }
    std::visit([this](const auto& payload) { on(payload); }, ev.payload);
    s_.tick_ = ev.tick;
    ++s_.version_;

    std::vector<RuleChange> changes = std::move(withdrawals_);
    changes.insert(changes.end(), installs_.begin(), installs_.end());
    return changes;
  }

 private:
  // Topology --------------------------------------------------------------

  void on(const events::DeviceUp& e) {
    if (e.device.empty()) {
      throw ValidationError("device id must be non-empty");
    }
    if (auto* d = device(e.device)) {
      d->up = true;
    } else {
      s_.devices_.push_back(DeviceState{e.device, true});
    }
    topology_changed();
  }

  void on(const events::DeviceDown& e) {
    auto* d = device(e.device);
    if (!d) {
      throw NotFoundError("unknown device '" + e.device + "'");
    }
    d->up = false;
    topology_changed();
  }

  void on(const events::LinkUp& e) {
    if (auto* l = link(e.src, e.dst)) {
      if (e.level) {
        check_level(*e.level, e.src, e.dst);
        l->level = *e.level;
      }
      l->up = true;
    } else {
      if (!device(e.src) || !device(e.dst)) {
        throw NotFoundError("link " + link_name(e.src, e.dst) + " has an unknown endpoint");
      }
      if (e.src == e.dst) {
        throw ValidationError("self-loop on '" + e.src + "'");
      }
      if (!e.level) {
        throw ValidationError("new link " + link_name(e.src, e.dst) + " needs a level");
      }
      check_level(*e.level, e.src, e.dst);
      s_.link_index_.emplace(std::pair{e.src, e.dst}, s_.links_.size());
      s_.links_.push_back(LinkState{e.src, e.dst, *e.level, true});
    }
    topology_changed();
  }

  void on(const events::LinkDown& e) {
    auto* l = link(e.src, e.dst);
    if (!l) {
      throw NotFoundError("unknown link " + link_name(e.src, e.dst));
    }
    l->up = false;
    topology_changed();
  }

  void on(const events::LinkSecurityChanged& e) {
    auto* l = link(e.src, e.dst);
    if (!l) {
      throw NotFoundError("unknown link " + link_name(e.src, e.dst));
    }
    check_level(e.level, e.src, e.dst);
    l->level = e.level;
    topology_changed();
  }

  void on(const events::SlaUpdated& e) {
    s_.sla_ = e.policy;
    for (auto& f : s_.flows_) {
      f.requirement = min_security(s_.sla_, f.match);
    }
    reroute_from(0);
  }

  // Flows -----------------------------------------------------------------

  void on(const events::PacketIn& e) {
    const auto match = parse_header(e.header);
    if (!device(e.ingress)) {
      throw NotFoundError("unknown ingress device '" + e.ingress + "'");
    }
    if (s_.find_flow(match)) {
      return;  // already known; its rules (or rejection) stand
    }
    const auto* src = s_.find_host(match.source);
    const auto* dst = s_.find_host(match.destination);
    if (!src || !dst) {
      throw NotFoundError("no host with address " +
                          (src ? match.destination : match.source).to_string());
    }
    add_flow(e.flow_id.value_or(fresh_flow_id()), e.header, match, src->device, dst->device);
  }

  void on(const events::FlowRequested& e) {
    const auto& f = e.flow;
    if (f.id.empty()) {
      throw ValidationError("flow id must be non-empty");
    }
    if (!device(f.origin) || !device(f.destination)) {
      throw NotFoundError("flow '" + f.id + "' has an unknown endpoint device");
    }
    const auto match = parse_header(f.header);
    if (s_.find_flow(match)) {
      throw ValidationError("flow '" + f.id + "' has the same match fields as flow '" +
                            s_.find_flow(match)->id + "'");
    }
    add_flow(f.id, f.header, match, f.origin, f.destination);
  }

  void add_flow(std::string id, const Bytes& header, const HeaderFields& match, const NodeId& origin,
                const NodeId& destination) {
    if (s_.find_flow(id)) {
      throw ValidationError("duplicate flow id '" + id + "'");
    }
    if (origin == destination) {
      throw ValidationError("flow '" + id + "' starts and ends at device '" + origin + "'");
    }
    ++s_.next_flow_number_;
    FlowRecord rec{std::move(id), header, match, origin, destination,
                   min_security(s_.sla_, match), {}};
    const auto index = s_.flows_.size();
    s_.flow_by_id_.emplace(rec.id, index);
    s_.flow_by_match_.emplace(rec.match, index);
    s_.flows_.push_back(std::move(rec));
    reroute_from(index);
  }

  std::string fresh_flow_id() const {
    auto n = s_.next_flow_number_;
    while (s_.find_flow("flow-" + std::to_string(n))) {
      ++n;
    }
    return "flow-" + std::to_string(n);
  }

  // Routing ---------------------------------------------------------------

  void topology_changed() {
    std::vector<NodeId> nodes;
    std::unordered_set<std::string> up;
    for (const auto& d : s_.devices_) {
      nodes.push_back(d.id);
      if (d.up) {
        up.insert(d.id);
      }
    }
    std::vector<Link> active;
    for (const auto& l : s_.links_) {
      if (l.up && up.count(l.src) && up.count(l.dst)) {
        active.push_back(Link{l.src, l.dst, l.level});
      }
    }
    s_.routing_ = std::make_shared<const Routing>(build_network(nodes, active));
    reroute_from(0);
  }

  bool still_feasible(const FlowRecord& f) const {
    const auto& net = s_.active_network();
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      const auto a = net.find(f.path[i]);
      const auto b = net.find(f.path[i + 1]);
      if (!a || !b) {
        return false;
      }
      const auto level = net.try_level(Edge{*a, *b});
      if (!level || *level < f.requirement) {
        return false;
      }
    }
    return true;
  }

  /// Re-solves flows [first, end): admitted flows whose path is still
  /// feasible are kept under KeepFeasible, the rest go through the solver.
  void reroute_from(std::size_t first) {
    const auto& routing = s_.routing();
    std::vector<Flow> pending;
    std::vector<std::size_t> slots;
    std::map<Bytes, SecurityLevel> requirement;
    for (std::size_t i = first; i < s_.flows_.size(); ++i) {
      const auto& f = s_.flows_[i];
      if (options_.reroute == ReroutePolicy::KeepFeasible && f.admitted() && still_feasible(f)) {
        continue;
      }
      pending.push_back(Flow{f.id, f.origin, f.destination, f.header});
      slots.push_back(i);
      requirement.emplace(f.header, f.requirement);
    }
    if (pending.empty()) {
      return;
    }
    const auto mapping = solve(
        routing.network, routing.widest, routing.bottleneck, pending,
        [&requirement](std::span<const std::uint8_t> h) {
          return requirement.at(Bytes(h.begin(), h.end()));
        });
    for (std::size_t k = 0; k < slots.size(); ++k) {
      auto& f = s_.flows_[slots[k]];
      auto path = path_names(routing.network, mapping.assignments()[k].path);
      if (path != f.path) {
        withdraw(f);
        f.path = std::move(path);
        install(f);
      }
    }
  }

  void withdraw(const FlowRecord& f) {
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      auto& table = s_.tables_[f.path[i]];
      const auto it = table.find(f.match);
      if (it != table.end()) {
        withdrawals_.push_back(RuleChange{RuleChange::Op::Withdraw, it->second});
        table.erase(it);
      }
      if (table.empty()) {
        s_.tables_.erase(f.path[i]);
      }
    }
  }

  void install(const FlowRecord& f) {
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      ForwardingRule rule{f.path[i], f.path[i + 1], f.match, f.id};
      s_.tables_[rule.device][f.match] = rule;
      installs_.push_back(RuleChange{RuleChange::Op::Install, std::move(rule)});
    }
  }

  DeviceState* device(std::string_view id) {
    return const_cast<DeviceState*>(s_.find_device(id));
  }
  LinkState* link(std::string_view src, std::string_view dst) {
    return const_cast<LinkState*>(s_.find_link(src, dst));
  }

  DataplaneState& s_;
  const OrchestratorOptions& options_;
  std::vector<RuleChange> withdrawals_;
  std::vector<RuleChange> installs_;
};

Transition apply_event(const DataplaneState& state, const NetworkEvent& event,
                       const OrchestratorOptions& options) {
  Transition t{state, {}};
  t.changes = StateEditor(t.state, options).apply(event);
  return t;
}

TraceResult inject_packet(const DataplaneState& state, std::span<const std::uint8_t> header,
                          std::string_view ingress) {
  if (!state.find_device(ingress)) {
    throw NotFoundError("unknown ingress device '" + std::string(ingress) + "'");
  }
  TraceResult result;
  result.hops.emplace_back(ingress);

  HeaderFields match;
  try {
    match = parse_header(header);
  } catch (const ParseError&) {
    result.status = TraceResult::Status::Dropped;
    return result;
  }

  std::optional<NodeId> destination;
  if (const auto* flow = state.find_flow(match)) {
    destination = flow->destination;
  } else if (const auto* host = state.find_host(match.destination)) {
    destination = host->device;
  }

  NodeId current(ingress);
  while (true) {
    if (destination && current == *destination) {
      result.status = TraceResult::Status::Delivered;
      return result;
    }
    const auto* rule = state.lookup(current, match);
    if (!rule) {
      result.status = TraceResult::Status::Dropped;
      result.packet_in = NetworkEvent{
          state.tick(), events::PacketIn{Bytes(header.begin(), header.end()), current, {}}};
      return result;
    }
    if (result.hops.size() > state.devices().size()) {
      result.status = TraceResult::Status::Loop;
      return result;
    }
    current = rule->next;
    result.hops.push_back(current);
  }
}

std::vector<std::string> check_dataplane(const DataplaneState& state) {
  std::vector<std::string> problems;
  const auto& net = state.active_network();
  std::size_t expected_rules = 0;

  for (const auto& f : state.flows()) {
    if (!f.admitted()) {
      continue;
    }
    const auto where = "flow '" + f.id + "'";
    if (f.path.size() < 2 || f.path.front() != f.origin || f.path.back() != f.destination) {
      problems.push_back(where + ": path does not run from origin to destination");
      continue;
    }
    Path p;
    try {
      p = path_through(net, f.path);
    } catch (const NotFoundError& e) {
      problems.push_back(where + ": path uses an inactive link: " + e.what());
      continue;
    }
    if (!path_is_valid_simple(net, p, net.index_of(f.origin), net.index_of(f.destination))) {
      problems.push_back(where + ": path is not simple");
    }
    if (path_bottleneck(net, p) < f.requirement) {
      problems.push_back(where + ": path bottleneck " + std::to_string(path_bottleneck(net, p)) +
                         " below requirement " + std::to_string(f.requirement));
    }
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      const auto* rule = state.lookup(f.path[i], f.match);
      if (!rule || rule->next != f.path[i + 1] || rule->flow_id != f.id) {
        problems.push_back(where + ": missing or wrong rule at '" + f.path[i] + "'");
      }
    }
    expected_rules += f.path.size() - 1;
  }

  for (const auto& [device, table] : state.tables()) {
    for (const auto& [match, rule] : table) {
      const auto* flow = state.find_flow(rule.flow_id);
      if (!flow || !flow->admitted()) {
        problems.push_back("orphan rule for flow '" + rule.flow_id + "' at '" + device + "'");
        continue;
      }
      const auto* link = state.find_link(rule.device, rule.next);
      if (!link || !link->up || link->level < flow->requirement) {
        problems.push_back("rule at '" + device + "' for flow '" + rule.flow_id +
                           "' forwards over an unusable link");
      }
    }
  }
  if (state.rule_count() != expected_rules) {
    problems.push_back("rule count " + std::to_string(state.rule_count()) + " != " +
                       std::to_string(expected_rules) + " hops of admitted paths");
  }
  return problems;
}

Orchestrator::Orchestrator(DataplaneState initial, OrchestratorOptions options)
    : state_(std::move(initial)), options_(options) {}

std::vector<RuleChange> Orchestrator::handle(const NetworkEvent& event) {
  return StateEditor(state_, options_).apply(event);
}

}  // namespace farsec
