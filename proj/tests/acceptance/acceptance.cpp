// Acceptance checks P1..P7. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "farsec/bench.hpp"
#include "farsec/error.hpp"
#include "farsec/event_log.hpp"
#include "farsec/instance_gen.hpp"
#include "farsec/orchestrator.hpp"
#include "farsec/service.hpp"
#include "farsec/solver.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace farsec;
using farsec::testing::data_path;
using farsec::testing::read_text;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) {
      detail = why;
    }
    ok = false;
  }
};

/// Every simple path from `src`, reported as (destination, bottleneck, path).
/// Written here from scratch so the library oracle is not checked against itself.
void enumerate_paths(const SecureNetwork& net, NodeIndex src,
                     const std::function<void(NodeIndex, SecurityLevel, const Path&)>& visit) {
  std::vector<bool> on(net.node_count(), false);
  Path path;
  std::function<void(NodeIndex, SecurityLevel)> dfs = [&](NodeIndex u, SecurityLevel width) {
    on[u] = true;
    for (NodeIndex v = 0; v < net.node_count(); ++v) {
      const auto level = net.try_level(Edge{u, v});
      if (!level || on[v]) {
        continue;
      }
      path.edges.push_back(Edge{u, v});
      const auto w = std::min(width, *level);
      visit(v, w, path);
      dfs(v, w);
      path.edges.pop_back();
    }
    on[u] = false;
  };
  dfs(src, kUnbounded);
}

/// Brute-force widest widths; -1 where unreachable.
std::vector<std::vector<SecurityLevel>> brute_widths(const SecureNetwork& net) {
  const auto n = net.node_count();
  std::vector<std::vector<SecurityLevel>> best(n, std::vector<SecurityLevel>(n, -1));
  for (NodeIndex s = 0; s < n; ++s) {
    best[s][s] = kUnbounded;
    enumerate_paths(net, s, [&](NodeIndex d, SecurityLevel w, const Path&) {
      best[s][d] = std::max(best[s][d], w);
    });
  }
  return best;
}

std::string path_text(const SecureNetwork& net, const Path& p) {
  std::string out;
  for (const auto& n : path_names(net, p)) {
    out += (out.empty() ? "" : "|") + n;
  }
  return out.empty() ? "-" : out;
}

// --- P1 ---------------------------------------------------------------------

Verdict p1() {
  Verdict v;
  const auto net = parse_resources(read_text(data_path("four_node/resources.csv")));
  const auto flows = parse_requests(read_text(data_path("four_node/requests.csv")));
  const auto sla = parse_sla(read_text(data_path("four_node/sla.csv")));
  const auto m = solve(net, flows, sla_min_security(sla));

  struct Expect {
    const char* id;
    bool admitted;
    SecurityLevel bottleneck;
    std::vector<NodeId> witness;
  };
  const std::vector<Expect> expected{{"0001", true, 3, {"N1", "N4", "N2"}},
                                     {"0010", false, 0, {}},
                                     {"0011", true, 3, {"N3", "N4", "N2"}},
                                     {"0100", true, 2, {"N4", "N3", "N1"}}};
  for (const auto& e : expected) {
    const auto* a = m.find(e.id);
    if (!a) {
      v.fail(std::string("missing flow ") + e.id);
      continue;
    }
    if (a->admitted() != e.admitted) {
      v.fail(std::string("flow ") + e.id + " admission differs");
      continue;
    }
    if (!e.admitted) {
      continue;
    }
    if (!path_is_valid_simple(net, a->path, a->origin, a->destination)) {
      v.fail(std::string("flow ") + e.id + " path not simple");
    }
    if (path_bottleneck(net, a->path) != e.bottleneck) {
      v.fail(std::string("flow ") + e.id + " bottleneck " +
             std::to_string(path_bottleneck(net, a->path)));
    }
    // Identity with the witness only where the widest path is unique.
    int widest = 0;
    enumerate_paths(net, a->origin, [&](NodeIndex d, SecurityLevel w, const Path&) {
      widest += d == a->destination && w == e.bottleneck ? 1 : 0;
    });
    if (widest == 1 && path_names(net, a->path) != e.witness) {
      v.fail(std::string("flow ") + e.id + " path " + path_text(net, a->path));
    }
  }
  v.detail = v.ok ? "0001,0011,0100 admitted at 3,3,2; 0010 rejected" : v.detail;
  return v;
}

// --- P2 ---------------------------------------------------------------------

Verdict p2() {
  Verdict v;
  std::mt19937_64 rng(0x5eed0002);
  const int trials = 500;
  for (int t = 0; t < trials && v.ok; ++t) {
    const auto n = 2 + rng() % 7;
    const double density = 0.1 + 0.1 * static_cast<double>(rng() % 8);
    const auto net = farsec::testing::random_network(rng, n, 5, density);
    const auto w = all_pairs_widest(net);
    const auto brute = brute_widths(net);
    for (NodeIndex i = 0; i < n; ++i) {
      for (NodeIndex j = 0; j < n; ++j) {
        const bool reach = brute[i][j] >= 0;
        const auto expect = reach ? brute[i][j] : 0;
        if (w.width(i, j) != expect || (i != j && w.reachable(i, j) != reach)) {
          v.fail("trial " + std::to_string(t) + " pair " + net.name(i) + "->" + net.name(j));
        }
      }
    }
  }
  if (v.ok) {
    v.detail = std::to_string(trials) + " networks, all pairs equal";
  }
  return v;
}

// --- P3 ---------------------------------------------------------------------

Verdict p3() {
  Verdict v;
  std::mt19937_64 rng(0x5eed0003);
  const int trials = 200;
  std::size_t admitted = 0;
  std::size_t rejected = 0;
  for (int t = 0; t < trials; ++t) {
    const auto n = 2 + rng() % 7;
    const auto net = farsec::testing::random_network(rng, n, 5, 0.2 + 0.1 * (rng() % 5));
    const auto brute = brute_widths(net);
    std::vector<Flow> flows;
    for (int k = 0; k < 60; ++k) {
      const auto o = rng() % n;
      auto d = rng() % (n - 1);
      d += d >= o ? 1 : 0;
      flows.push_back(Flow{"f" + std::to_string(k), net.name(o), net.name(d),
                           {static_cast<std::uint8_t>(rng() % 7)}});
    }
    const auto m = solve(net, flows, [](std::span<const std::uint8_t> h) {
      return static_cast<SecurityLevel>(h[0]);
    });
    for (const auto& a : m.assignments()) {
      if (a.admitted()) {
        ++admitted;
        if (!path_is_valid_simple(net, a.path, a.origin, a.destination)) {
          v.fail("trial " + std::to_string(t) + " " + a.flow_id + ": invalid path");
        }
        for (const auto& e : a.path.edges) {
          if (net.level(e) < a.requirement) {
            v.fail("trial " + std::to_string(t) + " " + a.flow_id + ": under-secure edge");
          }
        }
      } else {
        ++rejected;
        if (brute[a.origin][a.destination] >= a.requirement) {
          v.fail("trial " + std::to_string(t) + " " + a.flow_id + ": feasible but rejected");
        }
      }
    }
  }
  if (v.ok) {
    v.detail = std::to_string(trials) + " instances, " + std::to_string(admitted) +
               " admitted and " + std::to_string(rejected) + " rejected, no violations";
  }
  return v;
}

// --- P4 ---------------------------------------------------------------------

std::string run_cli(const std::string& args) {
#ifdef FARSEC_CLI
  const std::string cmd = std::string("\"") + FARSEC_CLI + "\" " + args + " >/dev/null 2>&1";
  if (std::system(cmd.c_str()) != 0) {
    throw Error("command failed: " + cmd);
  }
  return cmd;
#else
  (void)args;
  throw Error("CLI not built");
#endif
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("farsec-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

Verdict p4() {
  Verdict v;
  std::vector<BenchRow> rows;
#ifdef FARSEC_CLI
  const auto out = scratch("bench.csv");
  run_cli("bench --sizes 2..50 --seed 1 --out \"" + out.string() + "\"");
  std::istringstream in(read_text(out));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    BenchRow r;
    char c;
    std::istringstream ls(line);
    ls >> r.size >> c >> r.flows >> c >> r.admitted >> c >> r.seconds;
    rows.push_back(r);
  }
#else
  std::vector<int> sizes;
  for (int s = 2; s <= 50; ++s) {
    sizes.push_back(s);
  }
  rows = run_bench(sizes, GenConfig{});
#endif
  if (rows.size() != 49) {
    v.fail("expected 49 bench rows, got " + std::to_string(rows.size()));
    return v;
  }
  double worst = 0;
  std::size_t max_flows = 0;
  for (const auto& r : rows) {
    worst = std::max(worst, r.seconds);
    max_flows = std::max(max_flows, r.flows);
    if (r.seconds >= 5.0) {
      v.fail("size " + std::to_string(r.size) + " took " + std::to_string(r.seconds) + " s");
    }
  }

  // Growth in |F| at fixed |V|: least-squares slope of log time on log flows.
  GenConfig cfg;
  cfg.size = 30;
  cfg.seed = 3;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const std::int64_t mult : {32, 64, 128, 256, 512, 1024}) {
    cfg.flow_multiplier = mult;
    const auto inst = generate(cfg);
    double best = 1e9;
    for (int rep = 0; rep < 5; ++rep) {
      best = std::min(best, time_instance(inst).seconds);
    }
    xs.push_back(std::log(static_cast<double>(inst.flows.size())));
    ys.push_back(std::log(std::max(best, 1e-7)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (slope > 1.3) {
    v.fail("log-log slope " + std::to_string(slope) + " > 1.3");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max %.4f s over 49 sizes (up to %zu flows), slope %.2f", worst,
                max_flows, slope);
  if (v.ok) {
    v.detail = buf;
  } else {
    v.detail += std::string("; ") + buf;
  }
  return v;
}

// --- P5 ---------------------------------------------------------------------

Verdict p5() {
  Verdict v;
  try {
    const auto res = read_text(data_path("formats/resources.csv"));
    const auto req = read_text(data_path("formats/requests.csv"));
    const auto sla = read_text(data_path("formats/sla.csv"));
    if (format_resources(parse_resources(res)) != res) {
      v.fail("resources round trip");
    }
    if (format_requests(parse_requests(req)) != req) {
      v.fail("requests round trip");
    }
    const auto policy = parse_sla(sla);
    if (format_sla(policy) != sla) {
      v.fail("sla round trip");
    }
    HeaderFields udp;
    udp.source = Ipv4Address::parse("10.1.2.3");
    udp.destination = Ipv4Address::parse("10.4.5.6");
    udp.source_port = 33333;
    for (int port = 4990; port <= 5015; ++port) {
      udp.destination_port = static_cast<std::uint16_t>(port);
      const auto want = port >= 5000 && port <= 5005 ? 2 : 0;
      if (min_security(policy, udp) != want) {
        v.fail("UDP port " + std::to_string(port));
      }
    }
    HeaderFields icmp = parse_header(parse_requests(req).at(0).header);
    if (min_security(policy, icmp) != 0) {
      v.fail("unmatched ICMP not 0");
    }
  } catch (const std::exception& e) {
    v.fail(e.what());
  }
  if (v.ok) {
    v.detail = "three files byte-identical after round trip; UDP 5000-5005 -> 2, else 0";
  }
  return v;
}

// --- P6 ---------------------------------------------------------------------

bool rules_secure(const DataplaneState& s, std::string& why) {
  for (const auto& [device, table] : s.tables()) {
    for (const auto& [match, rule] : table) {
      const auto* flow = s.find_flow(rule.flow_id);
      const auto* link = s.find_link(rule.device, rule.next);
      if (!flow || !link || !link->up || link->level < flow->requirement) {
        why = "rule " + rule.device + "->" + rule.next + " for " + rule.flow_id;
        return false;
      }
    }
  }
  return true;
}

Verdict p6() {
  Verdict v;
  Orchestrator orch(load_state(data_path("demo")));
  const auto log = parse_event_log(read_text(data_path("demo/events.jsonl")));
  bool admitted_both = false;
  bool rerouted = false;
  bool withdrawn = false;
  std::map<std::string, std::vector<NodeId>> last_path;
  for (const auto& ev : log) {
    orch.handle(ev);
    const auto& s = orch.state();
    std::string why;
    if (!rules_secure(s, why)) {
      v.fail("tick " + std::to_string(ev.tick) + ": " + why);
    }
    for (const auto& p : check_dataplane(s)) {
      v.fail("tick " + std::to_string(ev.tick) + ": " + p);
    }
    const auto& flows = s.flows();
    if (ev.tick == 2) {
      admitted_both = flows.size() == 2 && flows[0].admitted() && flows[1].admitted() &&
                      flows[0].requirement == 3 && flows[1].requirement == 3;
    }
    for (const auto& f : flows) {
      const auto trace = inject_packet(s, f.header, f.origin);
      const auto before = last_path.find(f.id);
      if (f.admitted()) {
        if (trace.status != TraceResult::Status::Delivered || trace.hops != f.path) {
          v.fail("tick " + std::to_string(ev.tick) + ": " + f.id + " not delivered");
        }
        if (before != last_path.end() && !before->second.empty() && before->second != f.path) {
          rerouted = true;
        }
      } else if (before != last_path.end() && !before->second.empty()) {
        withdrawn = withdrawn || trace.status == TraceResult::Status::Dropped;
        // Withdrawal only happens when no secure enough path remains.
        const auto& net = s.active_network();
        const auto w = oracle_widest(net, net.index_of(f.origin), net.index_of(f.destination));
        if (!w.path.empty() && w.width >= f.requirement) {
          v.fail("tick " + std::to_string(ev.tick) + ": " + f.id + " withdrawn needlessly");
        }
      }
      last_path[f.id] = f.path;
    }
  }
  if (!admitted_both) {
    v.fail("both flows not admitted at requirement 3");
  }
  if (!rerouted) {
    v.fail("no reroute observed");
  }
  if (!withdrawn) {
    v.fail("no withdrawal observed");
  }
  if (v.ok) {
    v.detail = std::to_string(log.size()) + " events: admit, reroute, withdraw; invariants held";
  }
  return v;
}

// --- P7 ---------------------------------------------------------------------

Verdict p7() {
  Verdict v;
#ifdef FARSEC_CLI
  const auto fn = data_path("four_node");
  for (int run = 0; run < 2; ++run) {
    const auto tag = std::to_string(run);
    run_cli("solve --resources \"" + (fn / "resources.csv").string() + "\" --requests \"" +
            (fn / "requests.csv").string() + "\" --sla \"" + (fn / "sla.csv").string() +
            "\" --out \"" + scratch("mapping" + tag + ".csv").string() + "\"");
    run_cli("bench --sizes 2..50 --seed 9 --no-timing --out \"" +
            scratch("bench" + tag + ".csv").string() + "\"");
    run_cli("gen --size 40 --seed 9 --out-dir \"" + scratch("gen" + tag).string() + "\"");
  }
  const auto same = [&](const fs::path& a, const fs::path& b) {
    if (!fs::exists(a) || read_text(a) != read_text(b)) {
      v.fail(a.filename().string() + " differs between runs");
    }
  };
  same(scratch("mapping0.csv"), scratch("mapping1.csv"));
  same(scratch("bench0.csv"), scratch("bench1.csv"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(scratch("gen0"))) {
    same(e.path(), scratch("gen1") / e.path().filename());
    ++files;
  }
  if (files != 4) {
    v.fail("generator wrote " + std::to_string(files) + " files");
  }
  if (v.ok) {
    v.detail = "mapping, bench (seconds column omitted) and 4 generator files identical";
  }
#else
  v.fail("CLI not built");
#endif
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> checks{
      {"P1 worked example", p1},  {"P2 oracle equivalence", p2}, {"P3 admission properties", p3},
      {"P4 scaling", p4},         {"P5 format fidelity", p5},    {"P6 demo replay", p6},
      {"P7 determinism", p7},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    const auto secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2fs): %s\n", v.ok ? "PASS" : "FAIL", name, secs, v.detail.c_str());
    std::fflush(stdout);
    failed += v.ok ? 0 : 1;
  }
  std::error_code ec;
  fs::remove_all(scratch("").parent_path(), ec);
  return failed == 0 ? 0 : 1;
}
