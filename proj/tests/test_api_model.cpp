#include <gtest/gtest.h>

#include "farsec/api_model.hpp"
#include "farsec/error.hpp"
#include "farsec/event_log.hpp"
#include "farsec/service.hpp"
#include "test_support.hpp"

namespace farsec {
namespace {

using nlohmann::json;
using testing::data_path;

TEST(Snapshot, FourNodeShape) {
  const auto s = load_state(data_path("four_node"));
  const auto j = snapshot_json(s, 0);
  EXPECT_EQ(j.at("version"), 0);
  EXPECT_EQ(j.at("nodes").size(), 4u);
  EXPECT_EQ(j.at("links").size(), 12u);
  EXPECT_EQ(j.at("hosts").size(), 4u);
  EXPECT_EQ(j.at("sla").size(), 3u);
  ASSERT_EQ(j.at("flows").size(), 4u);

  const auto& f1 = j.at("flows")[0];
  EXPECT_EQ(f1.at("id"), "0001");
  EXPECT_EQ(f1.at("admitted"), true);
  EXPECT_EQ(f1.at("path"), json({"N1", "N4", "N2"}));
  EXPECT_EQ(f1.at("requirement"), 3);
  const auto& f2 = j.at("flows")[1];
  EXPECT_EQ(f2.at("admitted"), false);
  EXPECT_TRUE(f2.at("path").is_null());

  EXPECT_EQ(j.at("links")[0].dump(), R"({"dst":"N2","level":2,"src":"N1","up":true})");
}

TEST(Snapshot, EmptyState) {
  const auto j = snapshot_json(DataplaneState{}, 0);
  EXPECT_EQ(j.dump(), R"({"flows":[],"hosts":[],"links":[],"nodes":[],"sla":[],"version":0})");
}

TEST(Delta, LinkChangeCarriesLinkAndFlows) {
  const auto s = load_state(data_path("four_node"));
  const auto before = snapshot_json(s, 0);
  const auto t = apply_event(s, NetworkEvent{1, events::LinkSecurityChanged{"N1", "N4", 0}});
  const auto after = snapshot_json(t.state, 1);
  const auto d = make_delta(before, after, t.changes, 1);

  EXPECT_EQ(d.at("version"), 1);
  const auto& changes = d.at("changes");
  ASSERT_GE(changes.size(), 2u);
  EXPECT_EQ(changes[0].at("type"), "link");
  EXPECT_EQ(changes[0].at("link").at("level"), 0);
  bool saw_flow = false;
  for (const auto& c : changes) {
    saw_flow = saw_flow || (c.at("type") == "flow" && c.at("flow").at("id") == "0001");
  }
  EXPECT_TRUE(saw_flow);
  EXPECT_EQ(changes.back().at("type"), "rules");
  EXPECT_EQ(apply_delta(before, d), after);
}

TEST(Delta, NoChangeIsEmpty) {
  const auto s = load_state(data_path("four_node"));
  const auto j = snapshot_json(s, 0);
  const auto d = make_delta(j, snapshot_json(s, 1), {}, 1);
  EXPECT_TRUE(d.at("changes").empty());
  EXPECT_EQ(apply_delta(j, d), snapshot_json(s, 1));
}

TEST(Delta, RejectsUnknownChange) {
  const auto j = snapshot_json(DataplaneState{}, 0);
  const json bad{{"version", 1}, {"changes", json::array({json{{"type", "bogus"}}})}};
  EXPECT_THROW(apply_delta(j, bad), ParseError);
}

TEST(Delta, ReplayOfDemoLog) {
  // Folding every delta onto the first snapshot reproduces each later one.
  auto state = load_state(data_path("demo"));
  auto folded = snapshot_json(state, 0);
  std::uint64_t version = 0;
  for (const auto& ev : parse_event_log(testing::read_text(data_path("demo/events.jsonl")))) {
    const auto t = apply_event(state, ev);
    ++version;
    const auto next = snapshot_json(t.state, version);
    folded = apply_delta(folded, make_delta(snapshot_json(state, version - 1), next, t.changes,
                                            version));
    ASSERT_EQ(folded, next) << event_to_json(ev).dump();
    state = t.state;
  }
  EXPECT_EQ(folded.at("flows").size(), 2u);
}

}  // namespace
}  // namespace farsec
