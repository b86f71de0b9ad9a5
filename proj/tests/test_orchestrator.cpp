#include <gtest/gtest.h>

#include "farsec/error.hpp"
#include "farsec/event_log.hpp"
#include "farsec/orchestrator.hpp"
#include "farsec/service.hpp"
#include "test_support.hpp"

namespace farsec {
namespace {

using testing::data_path;

const Bytes kVideoA = decode_hex("4500001c000000004011f57ec0a80101c0a803019c40138c00080000");
const Bytes kVideoB = decode_hex("4500001c000000004011f57ec0a80101c0a803019c41138d00080000");

NetworkEvent at(std::uint64_t tick, EventPayload p) { return NetworkEvent{tick, std::move(p)}; }

DataplaneState demo() { return load_state(data_path("demo")); }

void expect_healthy(const DataplaneState& s) {
  const auto problems = check_dataplane(s);
  for (const auto& p : problems) {
    ADD_FAILURE() << p;
  }
}

TEST(Orchestrator, LoadsFourNodeExample) {
  const auto s = load_state(data_path("four_node"));
  ASSERT_EQ(s.flows().size(), 4u);
  EXPECT_EQ(s.find_flow("0001")->path, (std::vector<NodeId>{"N1", "N4", "N2"}));
  EXPECT_FALSE(s.find_flow("0010")->admitted());
  EXPECT_EQ(s.find_flow("0011")->path, (std::vector<NodeId>{"N3", "N4", "N2"}));
  EXPECT_EQ(s.find_flow("0100")->path, (std::vector<NodeId>{"N4", "N3", "N1"}));
  EXPECT_EQ(s.rule_count(), 6u);
  expect_healthy(s);
}

TEST(Orchestrator, TraceFollowsInstalledRules) {
  const auto s = load_state(data_path("four_node"));
  const auto admitted = inject_packet(s, s.find_flow("0001")->header, "N1");
  EXPECT_EQ(admitted.status, TraceResult::Status::Delivered);
  EXPECT_EQ(admitted.hops, (std::vector<NodeId>{"N1", "N4", "N2"}));

  const auto rejected = inject_packet(s, s.find_flow("0010")->header, "N2");
  EXPECT_EQ(rejected.status, TraceResult::Status::Dropped);
  ASSERT_TRUE(rejected.packet_in);

  HeaderFields unknown;
  unknown.source = Ipv4Address::parse("10.0.0.1");
  unknown.destination = Ipv4Address::parse("10.0.0.3");
  unknown.source_port = 1;
  unknown.destination_port = 2;
  const auto fresh = inject_packet(s, serialize_header(unknown), "N1");
  EXPECT_EQ(fresh.status, TraceResult::Status::Dropped);
  ASSERT_TRUE(fresh.packet_in);
  const auto& pin = std::get<events::PacketIn>(fresh.packet_in->payload);
  EXPECT_EQ(pin.ingress, "N1");

  // Feeding the PacketIn back admits the flow and the packet then arrives.
  const auto t = apply_event(s, *fresh.packet_in);
  EXPECT_EQ(inject_packet(t.state, serialize_header(unknown), "N1").status,
            TraceResult::Status::Delivered);
}

TEST(Orchestrator, DemoRerouteThenWithdraw) {
  Orchestrator orch(demo());
  orch.handle(at(1, events::PacketIn{kVideoA, "s1", std::nullopt}));
  orch.handle(at(2, events::PacketIn{kVideoB, "s1", std::nullopt}));
  const auto& s = orch.state();
  ASSERT_EQ(s.flows().size(), 2u);
  for (const auto& f : s.flows()) {
    EXPECT_EQ(f.requirement, 3);
    ASSERT_TRUE(f.admitted());
    EXPECT_EQ(f.path.size(), 3u);
  }
  const auto first_path = s.flows()[0].path;
  const auto via = first_path[1];
  const auto other = via == "s2" ? "s4" : "s2";

  // Downgrade the first hop of the current route: traffic moves to the other side.
  auto changes = orch.handle(at(3, events::LinkSecurityChanged{"s1", via, 2}));
  EXPECT_FALSE(changes.empty());
  EXPECT_EQ(changes.front().op, RuleChange::Op::Withdraw);
  for (const auto& f : orch.state().flows()) {
    EXPECT_EQ(f.path, (std::vector<NodeId>{"s1", other, "s3"}));
    EXPECT_EQ(inject_packet(orch.state(), f.header, "s1").status, TraceResult::Status::Delivered);
  }
  expect_healthy(orch.state());

  // Downgrade the alternative too: nothing at level 3 remains.
  changes = orch.handle(at(4, events::LinkSecurityChanged{other, "s3", 1}));
  EXPECT_EQ(changes.size(), 4u);
  for (const auto& c : changes) {
    EXPECT_EQ(c.op, RuleChange::Op::Withdraw);
  }
  for (const auto& f : orch.state().flows()) {
    EXPECT_FALSE(f.admitted());
    EXPECT_EQ(inject_packet(orch.state(), f.header, "s1").status, TraceResult::Status::Dropped);
  }
  EXPECT_EQ(orch.state().rule_count(), 0u);
  expect_healthy(orch.state());

  // Relaxing the requirement readmits both flows.
  const auto relaxed = parse_sla(std::string(kSlaHeader) +
                                 "\nUDP,0.0.0.0/0,0.0.0.0/0,0,0,65535,5000,5005,1\n");
  orch.handle(at(5, events::SlaUpdated{relaxed}));
  for (const auto& f : orch.state().flows()) {
    EXPECT_TRUE(f.admitted());
    EXPECT_EQ(f.requirement, 1);
  }
  expect_healthy(orch.state());
}

TEST(Orchestrator, KeepFeasibleVersusAlwaysWidest) {
  // a->b->d at level 3 and a->c->d at level 5. A flow needing 2 is placed on
  // the wider route; narrowing it to 3 keeps the flow put unless rerouting
  // to the widest path is requested.
  const std::vector<Link> links{{"a", "b", 3}, {"b", "d", 3}, {"a", "c", 5}, {"c", "d", 5}};
  const auto topo = network_from_links(links);
  HostAttachment ha{"ha", "a", Ipv4Address::parse("10.0.0.1")};
  HostAttachment hd{"hd", "d", Ipv4Address::parse("10.0.0.4")};
  HeaderFields h;
  h.source = ha.address;
  h.destination = hd.address;
  h.destination_port = 9;
  const auto sla = parse_sla(std::string(kSlaHeader) + "\nUDP,0.0.0.0/0,0.0.0.0/0,0,0,65535,9,9,2\n");
  const auto base = initial_state(topo, {ha, hd}, sla);

  for (const auto policy : {ReroutePolicy::KeepFeasible, ReroutePolicy::AlwaysWidest}) {
    OrchestratorOptions opts{policy};
    Orchestrator orch(base, opts);
    orch.handle(at(1, events::PacketIn{serialize_header(h), "a", std::nullopt}));
    ASSERT_EQ(orch.state().flows()[0].path, (std::vector<NodeId>{"a", "c", "d"}));
    orch.handle(at(2, events::LinkSecurityChanged{"a", "b", 4}));
    orch.handle(at(3, events::LinkSecurityChanged{"b", "d", 4}));
    orch.handle(at(4, events::LinkSecurityChanged{"c", "d", 3}));
    const auto expected = policy == ReroutePolicy::KeepFeasible
                              ? std::vector<NodeId>{"a", "c", "d"}
                              : std::vector<NodeId>{"a", "b", "d"};
    EXPECT_EQ(orch.state().flows()[0].path, expected);
    expect_healthy(orch.state());
  }
}

TEST(Orchestrator, UnrelatedChangeIsQuiet) {
  Orchestrator orch(load_state(data_path("four_node")));
  // N2->N3 carries no admitted path and raising it does not help 0010.
  const auto changes = orch.handle(at(1, events::LinkSecurityChanged{"N2", "N3", 0}));
  EXPECT_TRUE(changes.empty());
}

TEST(Orchestrator, TopologyEvents) {
  Orchestrator orch(load_state(data_path("four_node")));
  orch.handle(at(1, events::DeviceDown{"N4"}));
  const auto& s = orch.state();
  // Everything that crossed N4 must have moved or gone.
  for (const auto& f : s.flows()) {
    EXPECT_EQ(std::find(f.path.begin(), f.path.end(), "N4"), f.path.end());
  }
  expect_healthy(s);
  orch.handle(at(2, events::DeviceUp{"N4"}));
  orch.handle(at(3, events::LinkDown{"N1", "N4"}));
  EXPECT_EQ(orch.state().find_link("N1", "N4")->up, false);
  expect_healthy(orch.state());
  orch.handle(at(4, events::LinkUp{"N1", "N4", 5}));
  EXPECT_EQ(orch.state().find_link("N1", "N4")->level, 5);
  orch.handle(at(5, events::DeviceUp{"N5"}));
  orch.handle(at(6, events::LinkUp{"N5", "N1", 2}));
  EXPECT_EQ(orch.state().devices().size(), 5u);
  expect_healthy(orch.state());
}

TEST(Orchestrator, RejectsInvalidEvents) {
  const auto s = load_state(data_path("four_node"));
  EXPECT_THROW(apply_event(s, at(1, events::LinkSecurityChanged{"N1", "N9", 1})), NotFoundError);
  EXPECT_THROW(apply_event(s, at(1, events::LinkSecurityChanged{"N1", "N2", -1})),
               ValidationError);
  EXPECT_THROW(apply_event(s, at(1, events::DeviceDown{"N9"})), NotFoundError);
  EXPECT_THROW(apply_event(s, at(1, events::LinkUp{"N1", "N5", 1})), NotFoundError);
  const auto grown = apply_event(s, at(1, events::DeviceUp{"N5"})).state;
  EXPECT_THROW(apply_event(grown, at(2, events::LinkUp{"N1", "N5", std::nullopt})),
               ValidationError);
  EXPECT_THROW(apply_event(s, at(1, events::LinkUp{"N1", "N1", 1})), ValidationError);

  HeaderFields stranger;
  stranger.source = Ipv4Address::parse("10.9.9.9");
  stranger.destination = Ipv4Address::parse("10.0.0.2");
  EXPECT_THROW(apply_event(s, at(1, events::PacketIn{serialize_header(stranger), "N1", {}})),
               NotFoundError);
  EXPECT_THROW(apply_event(s, at(1, events::PacketIn{Bytes{0x45}, "N1", {}})), ParseError);

  const auto later = apply_event(s, at(5, events::DeviceUp{"N1"})).state;
  EXPECT_THROW(apply_event(later, at(4, events::DeviceUp{"N1"})), ValidationError);

  // The input state is never touched; loading admitted four flows.
  EXPECT_EQ(s.version(), 4u);
  EXPECT_EQ(s.tick(), 0u);
}

TEST(Orchestrator, ApplyEventIsPure) {
  const auto s = load_state(data_path("four_node"));
  const auto before = check_dataplane(s);
  const auto t = apply_event(s, at(1, events::LinkSecurityChanged{"N1", "N4", 0}));
  EXPECT_EQ(s.find_link("N1", "N4")->level, 3);
  EXPECT_EQ(s.find_flow("0001")->path, (std::vector<NodeId>{"N1", "N4", "N2"}));
  EXPECT_EQ(t.state.find_link("N1", "N4")->level, 0);
  EXPECT_EQ(t.state.version(), s.version() + 1);
}

TEST(EventLog, RoundTrip) {
  const std::vector<NetworkEvent> log{
      at(1, events::DeviceUp{"s9"}),
      at(2, events::DeviceDown{"s9"}),
      at(3, events::LinkUp{"s1", "s2", 4}),
      at(3, events::LinkUp{"s1", "s2", std::nullopt}),
      at(4, events::LinkDown{"s1", "s2"}),
      at(5, events::LinkSecurityChanged{"s1", "s2", 2}),
      at(6, events::PacketIn{kVideoA, "s1", std::string("video")}),
      at(7, events::SlaUpdated{parse_sla(std::string(kSlaHeader) + "\n")}),
      at(8, events::FlowRequested{Flow{"f", "s1", "s3", kVideoB}}),
  };
  const auto text = format_event_log(log);
  const auto back = parse_event_log(text);
  ASSERT_EQ(back.size(), log.size());
  EXPECT_EQ(format_event_log(back), text);
  EXPECT_EQ(event_to_json(log[5]).dump(),
            R"({"kind":"LinkSecurityChanged","payload":{"dst":"s2","level":2,"src":"s1"},"tick":5})");
}

TEST(EventLog, RejectsMalformed) {
  EXPECT_THROW(parse_event_log("{\"kind\":\"Nope\",\"payload\":{},\"tick\":1}\n"), ParseError);
  EXPECT_THROW(parse_event_log("{\"kind\":\"DeviceUp\",\"payload\":{},\"tick\":1}\n"), ParseError);
  EXPECT_THROW(parse_event_log("{\"kind\":\"DeviceUp\",\"payload\":{\"device\":\"a\"},\"tick\":-1}\n"),
               ParseError);
  EXPECT_THROW(parse_event_log("not json\n"), ParseError);
}

TEST(EventLog, ReplayIsDeterministic) {
  const auto log = parse_event_log(testing::read_text(data_path("demo/events.jsonl")));
  std::string first;
  for (int run = 0; run < 2; ++run) {
    Orchestrator orch(demo());
    std::string out;
    for (const auto& ev : log) {
      for (const auto& c : orch.handle(ev)) {
        out += rule_change_to_json(ev.tick, c).dump() + "\n";
      }
    }
    if (run == 0) {
      first = out;
    } else {
      EXPECT_EQ(out, first);
    }
  }
  EXPECT_FALSE(first.empty());
}

// Random replay ------------------------------------------------------------

struct RandomWorld {
  std::mt19937_64 rng;
  DataplaneState state;
  std::vector<HostAttachment> hosts;

  explicit RandomWorld(std::uint64_t seed) : rng(seed) {
    auto net = testing::random_network(rng, 10, 5, 0.3);
    for (std::size_t i = 0; i < 10; ++i) {
      hosts.push_back(HostAttachment{"h" + std::to_string(i), net.name(i),
                                     Ipv4Address(0x0a000001u + static_cast<std::uint32_t>(i))});
    }
    std::string sla(kSlaHeader);
    sla += "\n";
    for (int r = 0; r <= 5; ++r) {
      sla += "UDP,0.0.0.0/0,0.0.0.0/0,0,0,65535," + std::to_string(7000 + r) + "," +
             std::to_string(7000 + r) + "," + std::to_string(r) + "\n";
    }
    state = initial_state(net, hosts, parse_sla(sla));
  }

  std::size_t pick(std::size_t n) { return rng() % n; }

  EventPayload next_event() {
    const auto& links = state.links();
    switch (pick(10)) {
      case 0:
      case 1:
      case 2: {
        const auto& l = links[pick(links.size())];
        return events::LinkSecurityChanged{l.src, l.dst, static_cast<SecurityLevel>(pick(6))};
      }
      case 3: {
        const auto& l = links[pick(links.size())];
        if (l.up) {
          return events::LinkDown{l.src, l.dst};
        }
        return events::LinkUp{l.src, l.dst, std::nullopt};
      }
      case 4: {
        const auto& d = state.devices()[pick(state.devices().size())];
        if (d.up) {
          return events::DeviceDown{d.id};
        }
        return events::DeviceUp{d.id};
      }
      case 5: {
        std::string sla(kSlaHeader);
        sla += "\n";
        for (int r = 0; r <= 5; ++r) {
          sla += "UDP,0.0.0.0/0,0.0.0.0/0,0,0,65535," + std::to_string(7000 + r) + "," +
                 std::to_string(7000 + r) + "," + std::to_string(pick(6)) + "\n";
        }
        return events::SlaUpdated{parse_sla(sla)};
      }
      default: {
        const auto a = pick(hosts.size());
        auto b = pick(hosts.size() - 1);
        b += b >= a ? 1 : 0;
        HeaderFields h;
        h.source = hosts[a].address;
        h.destination = hosts[b].address;
        h.source_port = static_cast<std::uint16_t>(1024 + pick(50000));
        h.destination_port = static_cast<std::uint16_t>(7000 + pick(6));
        return events::PacketIn{serialize_header(h), hosts[a].device, std::nullopt};
      }
    }
  }
};

/// Every rejected flow is confirmed infeasible by the exhaustive oracle, and
/// the admitted set equals what a from-scratch solve would admit.
void check_against_oracle(const DataplaneState& s) {
  const auto& net = s.active_network();
  std::vector<Flow> flows;
  std::map<Bytes, SecurityLevel> req;
  for (const auto& f : s.flows()) {
    const auto o = net.index_of(f.origin);
    const auto d = net.index_of(f.destination);
    if (!f.admitted()) {
      const auto w = oracle_widest(net, o, d);
      ASSERT_TRUE(w.path.empty() || w.width < f.requirement)
          << "flow " << f.id << " rejected but oracle width " << w.width << " >= "
          << f.requirement;
    }
    flows.push_back(Flow{f.id, f.origin, f.destination, f.header});
    req.emplace(f.header, f.requirement);
  }
  const auto fresh = solve(net, flows, [&](std::span<const std::uint8_t> h) {
    return req.at(Bytes(h.begin(), h.end()));
  });
  for (std::size_t k = 0; k < flows.size(); ++k) {
    ASSERT_EQ(fresh.assignments()[k].admitted(), s.flows()[k].admitted()) << flows[k].id;
  }
}

TEST(Orchestrator, RandomReplayAgainstOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RandomWorld world(seed);
    Orchestrator orch(world.state);
    for (std::uint64_t tick = 1; tick <= 200; ++tick) {
      world.state = orch.state();
      auto ev = at(tick, world.next_event());
      try {
        orch.handle(ev);
      } catch (const ValidationError&) {
        continue;  // e.g. a PacketIn whose endpoints share a device
      }
      SCOPED_TRACE("seed " + std::to_string(seed) + " tick " + std::to_string(tick) + " " +
                   event_to_json(ev).dump());
      expect_healthy(orch.state());
      check_against_oracle(orch.state());
      if (::testing::Test::HasFatalFailure()) {
        return;
      }
    }
    EXPECT_GT(orch.state().flows().size(), 20u);
  }
}

TEST(Orchestrator, ReplayConverges) {
  // The same log from the same start yields the same tables.
  RandomWorld world(77);
  std::vector<NetworkEvent> log;
  {
    Orchestrator orch(world.state);
    for (std::uint64_t tick = 1; tick <= 120; ++tick) {
      world.state = orch.state();
      auto ev = at(tick, world.next_event());
      try {
        orch.handle(ev);
        log.push_back(ev);
      } catch (const ValidationError&) {
      }
    }
  }
  RandomWorld again(77);
  Orchestrator a(again.state);
  Orchestrator b(again.state);
  for (const auto& ev : log) {
    a.handle(ev);
    b.handle(ev);
  }
  EXPECT_EQ(a.state().tables(), b.state().tables());
}

}  // namespace
}  // namespace farsec
