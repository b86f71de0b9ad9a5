// farsec: command line front end.
//
//   farsec solve  --resources R.csv --requests Q.csv --sla S.csv [--out M.csv]
//   farsec gen    --size N --seed S --out-dir D
//   farsec serve  --port P [--load-dir D] [--static-dir W]
//   farsec bench  --sizes 2..50 --seed S --out results.csv
//   farsec replay --load-dir D --events E.jsonl [--out rules.jsonl]

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pthread.h>

#include <CLI11.hpp>

#include "farsec/bench.hpp"
#include "farsec/error.hpp"
#include "farsec/event_log.hpp"
#include "farsec/http_server.hpp"
#include "farsec/instance_gen.hpp"
#include "farsec/orchestrator.hpp"
#include "farsec/service.hpp"
#include "farsec/sla.hpp"
#include "farsec/solver.hpp"

namespace {

using namespace farsec;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw NotFoundError("cannot open " + path);
  }
  return in;
}

std::string read_all(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + out_path);
  }
  out << text;
}

struct SolveArgs {
  std::string resources, requests, sla, out;
};

int run_solve(const SolveArgs& a) {
  auto rin = open_in(a.resources);
  const auto net = read_resources(rin);
  auto qin = open_in(a.requests);
  const auto flows = read_requests(qin);
  auto sin = open_in(a.sla);
  const auto policy = load_sla(sin);

  const auto mapping = solve(net, flows, sla_min_security(policy));
  emit(a.out, format_mapping(net, mapping));
  std::cerr << mapping.admitted_count() << "/" << mapping.size() << " flows admitted\n";
  return 0;
}

struct GenArgs {
  GenConfig cfg;
  std::string out_dir = ".";
};

int run_gen(const GenArgs& a) {
  const auto inst = generate(a.cfg);
  for (const auto& p : write_instance(inst, a.out_dir)) {
    std::cout << p.string() << "\n";
  }
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string load_dir;
  std::string static_dir;
  bool always_widest = false;
};

int run_serve(const ServeArgs& a) {
  OrchestratorOptions opts;
  if (a.always_widest) {
    opts.reroute = ReroutePolicy::AlwaysWidest;
  }
  auto initial = a.load_dir.empty() ? DataplaneState{} : load_state(a.load_dir, opts);

  // Handle SIGINT/SIGTERM synchronously on this thread; every thread
  // started below inherits the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(std::move(initial), opts);
  std::optional<std::filesystem::path> static_dir;
  if (!a.static_dir.empty()) {
    static_dir = a.static_dir;
  }
  HttpServer server(service, static_dir);
  const int port = server.start(a.host, a.port);
  std::cerr << "listening on http://" << a.host << ":" << port << "\n";

  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "shutting down\n";
  server.stop();
  service.stop();
  return 0;
}

struct BenchArgs {
  std::string sizes = "2..50";
  GenConfig base;
  std::string out;
  bool no_timing = false;
};

int run_bench_cmd(const BenchArgs& a) {
  const auto rows = run_bench(parse_sizes(a.sizes), a.base);
  emit(a.out, format_bench(rows, !a.no_timing));
  return 0;
}

struct ReplayArgs {
  std::string load_dir;
  std::string events;
  std::string out;
  bool always_widest = false;
};

int run_replay(const ReplayArgs& a) {
  OrchestratorOptions opts;
  if (a.always_widest) {
    opts.reroute = ReroutePolicy::AlwaysWidest;
  }
  Orchestrator orch(load_state(a.load_dir, opts), opts);
  const auto log = parse_event_log(read_all(a.events));
  std::string out;
  int status = 0;
  for (const auto& ev : log) {
    for (const auto& c : orch.handle(ev)) {
      out += rule_change_to_json(ev.tick, c).dump();
      out += '\n';
    }
    for (const auto& v : check_dataplane(orch.state())) {
      std::cerr << "tick " << ev.tick << ": " << v << "\n";
      status = 2;
    }
  }
  emit(a.out, out);
  return status;
}

void add_gen_options(CLI::App* cmd, GenConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--flow-multiplier", cfg.flow_multiplier,
                  "flows generated per unit of total link security")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow admission and routing under minimal security constraints"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "admit and route the flows of a requests file");
  solve_cmd->add_option("--resources", solve_args.resources, "resources CSV")->required();
  solve_cmd->add_option("--requests", solve_args.requests, "requests CSV")->required();
  solve_cmd->add_option("--sla", solve_args.sla, "SLA CSV")->required();
  solve_cmd->add_option("--out", solve_args.out, "mapping CSV (default: stdout)");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "write a random instance");
  gen_cmd->add_option("--size", gen_args.cfg.size, "number of nodes")
      ->required()
      ->check(CLI::Range(2, 100000));
  add_gen_options(gen_cmd, gen_args.cfg);
  gen_cmd->add_option("--out-dir", gen_args.out_dir, "output directory")->capture_default_str();

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  serve_cmd->add_option("--port", serve_args.port, "TCP port, 0 for any")->capture_default_str();
  serve_cmd->add_option("--host", serve_args.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--load-dir", serve_args.load_dir,
                        "directory with resources.csv [requests.csv sla.csv hosts.csv]");
  serve_cmd->add_option("--static-dir", serve_args.static_dir, "files served under /");
  serve_cmd->add_flag("--always-widest", serve_args.always_widest,
                      "move every flow to its widest path on each change");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "time the solver on generated instances");
  bench_cmd->add_option("--sizes", bench_args.sizes, "a..b or a,b,c")->capture_default_str();
  add_gen_options(bench_cmd, bench_args.base);
  bench_cmd->add_option("--out", bench_args.out, "results CSV (default: stdout)");
  bench_cmd->add_flag("--no-timing", bench_args.no_timing, "omit the seconds column");

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "feed an event log to the orchestrator");
  replay_cmd->add_option("--load-dir", replay_args.load_dir, "initial state directory")
      ->required();
  replay_cmd->add_option("--events", replay_args.events, "JSON-lines event log")->required();
  replay_cmd->add_option("--out", replay_args.out, "rule changes (default: stdout)");
  replay_cmd->add_flag("--always-widest", replay_args.always_widest,
                       "move every flow to its widest path on each change");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*gen_cmd) return run_gen(gen_args);
    if (*serve_cmd) return run_serve(serve_args);
    if (*bench_cmd) return run_bench_cmd(bench_args);
    if (*replay_cmd) return run_replay(replay_args);
  } catch (const std::exception& e) {
    std::cerr << "farsec: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
