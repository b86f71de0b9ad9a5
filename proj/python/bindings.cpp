#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "farsec/api_model.hpp"
#include "farsec/bench.hpp"
#include "farsec/error.hpp"
#include "farsec/event_log.hpp"
#include "farsec/instance_gen.hpp"
#include "farsec/orchestrator.hpp"
#include "farsec/service.hpp"
#include "farsec/sla.hpp"
#include "farsec/solver.hpp"
#include "farsec/widest_paths.hpp"

namespace py = pybind11;
using namespace farsec;

namespace {

py::object optional_path(const SecureNetwork& net, const Path& p, bool reachable) {
  if (!reachable) {
    return py::none();
  }
  return py::cast(path_names(net, p));
}

py::dict assignment_dict(const SecureNetwork& net, const Assignment& a) {
  py::dict d;
  d["flow_id"] = a.flow_id;
  d["origin"] = net.name(a.origin);
  d["destination"] = net.name(a.destination);
  d["requirement"] = a.requirement;
  d["admitted"] = a.admitted();
  d["path"] = optional_path(net, a.path, a.admitted());
  return d;
}

py::dict header_dict(const HeaderFields& h) {
  py::dict d;
  d["protocol"] = to_string(h.protocol);
  d["source"] = h.source.to_string();
  d["destination"] = h.destination.to_string();
  d["dscp"] = h.dscp;
  d["source_port"] = h.source_port;
  d["destination_port"] = h.destination_port;
  return d;
}

/// Widest paths bundled with the network they were computed on, addressed
/// by node name.
struct PyWidest {
  SecureNetwork net;
  WidestPaths widest;

  SecurityLevel width(const std::string& o, const std::string& d) const {
    return widest.width(net.index_of(o), net.index_of(d));
  }
  py::object path(const std::string& o, const std::string& d) const {
    const auto i = net.index_of(o);
    const auto j = net.index_of(d);
    return optional_path(net, widest.path(i, j), widest.reachable(i, j));
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flow admission and routing under minimal per-link security constraints";
  m.attr("UNBOUNDED") = kUnbounded;

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_KeyError);

  py::class_<SecureNetwork>(m, "SecureNetwork")
      .def_static(
          "from_links",
          [](const std::vector<std::tuple<std::string, std::string, SecurityLevel>>& links,
             const std::vector<std::string>& extra_nodes) {
            std::vector<Link> ls;
            std::vector<NodeId> nodes(extra_nodes.begin(), extra_nodes.end());
            for (const auto& [s, d, l] : links) {
              ls.push_back(Link{s, d, l});
              for (const auto& n : {s, d}) {
                if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) {
                  nodes.push_back(n);
                }
              }
            }
            return build_network(nodes, ls);
          },
          py::arg("links"), py::arg("extra_nodes") = std::vector<std::string>{})
      .def_static("from_csv", &parse_resources, py::arg("text"))
      .def("to_csv", &format_resources)
      .def_property_readonly("nodes", &SecureNetwork::nodes)
      .def_property_readonly("links",
                             [](const SecureNetwork& n) {
                               std::vector<std::tuple<std::string, std::string, SecurityLevel>> out;
                               for (const auto& l : n.links()) {
                                 out.emplace_back(l.src, l.dst, l.level);
                               }
                               return out;
                             })
      .def("level",
           [](const SecureNetwork& n, const std::string& s, const std::string& d) {
             return n.level(Edge{n.index_of(s), n.index_of(d)});
           })
      .def("__len__", &SecureNetwork::node_count)
      .def("__eq__", [](const SecureNetwork& a, const SecureNetwork& b) { return a == b; });

  py::class_<PyWidest>(m, "WidestPaths")
      .def("width", &PyWidest::width, py::arg("origin"), py::arg("destination"))
      .def("path", &PyWidest::path, py::arg("origin"), py::arg("destination"));

  m.def(
      "all_pairs_widest",
      [](const SecureNetwork& net) { return PyWidest{net, all_pairs_widest(net)}; },
      py::arg("network"));

  m.def(
      "oracle_widest",
      [](const SecureNetwork& net, const std::string& o, const std::string& d) {
        const auto w = oracle_widest(net, net.index_of(o), net.index_of(d));
        return py::make_tuple(w.width, optional_path(net, w.path, !w.path.empty()));
      },
      py::arg("network"), py::arg("origin"), py::arg("destination"));

  m.def("parse_header", [](const std::string& hex) { return header_dict(parse_header_hex(hex)); },
        py::arg("hex"));

  m.def(
      "min_security",
      [](const std::string& sla_csv, const std::string& header_hex) {
        return min_security(parse_sla(sla_csv), parse_header_hex(header_hex));
      },
      py::arg("sla_csv"), py::arg("header_hex"));

  m.def(
      "solve",
      [](const SecureNetwork& net, const std::string& requests_csv, const std::string& sla_csv) {
        const auto flows = parse_requests(requests_csv);
        const auto mapping = solve(net, flows, sla_min_security(parse_sla(sla_csv)));
        py::list out;
        for (const auto& a : mapping.assignments()) {
          out.append(assignment_dict(net, a));
        }
        return out;
      },
      py::arg("network"), py::arg("requests_csv"), py::arg("sla_csv"));

  m.def(
      "solve_csv",
      [](const std::string& resources, const std::string& requests, const std::string& sla) {
        const auto net = parse_resources(resources);
        const auto flows = parse_requests(requests);
        return format_mapping(net, solve(net, flows, sla_min_security(parse_sla(sla))));
      },
      py::arg("resources_csv"), py::arg("requests_csv"), py::arg("sla_csv"),
      "Solves CSV inputs and returns the mapping CSV.");

  m.def(
      "generate",
      [](int size, std::uint64_t seed, std::int64_t flow_multiplier) {
        GenConfig cfg;
        cfg.size = size;
        cfg.seed = seed;
        cfg.flow_multiplier = flow_multiplier;
        const auto inst = generate(cfg);
        py::dict d;
        d["resources"] = format_resources(inst.network);
        d["requests"] = format_requests(inst.flows);
        d["sla"] = format_sla(inst.sla);
        d["hosts"] = format_hosts(inst.hosts);
        d["requirements"] = inst.requirements;
        return d;
      },
      py::arg("size"), py::arg("seed") = 1, py::arg("flow_multiplier") = 64);

  m.def(
      "bench",
      [](const std::vector<int>& sizes, std::uint64_t seed, bool with_timing) {
        GenConfig cfg;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return format_bench(run_bench(sizes, cfg), with_timing);
      },
      py::arg("sizes"), py::arg("seed") = 1, py::arg("with_timing") = true);

  py::class_<Orchestrator>(m, "Orchestrator")
      .def(py::init([](const std::string& dir, bool always_widest) {
             OrchestratorOptions opts;
             opts.reroute = always_widest ? ReroutePolicy::AlwaysWidest : ReroutePolicy::KeepFeasible;
             return Orchestrator(load_state(dir, opts), opts);
           }),
           py::arg("load_dir"), py::arg("always_widest") = false)
      .def(
          "handle_json",
          [](Orchestrator& o, const std::string& event_json) {
            const auto ev = event_from_json(nlohmann::json::parse(event_json));
            std::vector<std::string> out;
            for (const auto& c : o.handle(ev)) {
              out.push_back(rule_change_to_json(ev.tick, c).dump());
            }
            return out;
          },
          py::arg("event_json"))
      .def("snapshot_json",
           [](const Orchestrator& o) { return snapshot_json(o.state(), o.state().version()).dump(); })
      .def(
          "trace",
          [](const Orchestrator& o, const std::string& header_hex, const std::string& ingress) {
            const auto r = inject_packet(o.state(), decode_hex(header_hex), ingress);
            return py::make_tuple(std::string(to_string(r.status)), r.hops);
          },
          py::arg("header_hex"), py::arg("ingress"))
      .def("violations", [](const Orchestrator& o) { return check_dataplane(o.state()); })
      .def_property_readonly("rule_count", [](const Orchestrator& o) { return o.state().rule_count(); });
}
