#include "farsec/bench.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "csv.hpp"
#include "farsec/error.hpp"

namespace farsec {

BenchRow time_instance(const GeneratedInstance& inst) {
  const auto min_sec = sla_min_security(inst.sla);
  const auto start = std::chrono::steady_clock::now();
  const auto mapping = solve(inst.network, inst.flows, min_sec);
  const auto stop = std::chrono::steady_clock::now();

  BenchRow row;
  row.size = inst.config.size;
  row.flows = inst.flows.size();
  row.admitted = mapping.admitted_count();
  row.seconds = std::chrono::duration<double>(stop - start).count();
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<int>& sizes, const GenConfig& base) {
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (const int size : sizes) {
    auto cfg = base;
    cfg.size = size;
    rows.push_back(time_instance(generate(cfg)));
  }
  return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows, bool with_timing) {
  std::ostringstream out;
  out << "size,flows,admitted" << (with_timing ? ",seconds" : "") << '\n';
  for (const auto& r : rows) {
    out << r.size << ',' << r.flows << ',' << r.admitted;
    if (with_timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = csv::parse_int<int>(std::string_view(text).substr(0, dots), "sizes");
    const auto hi = csv::parse_int<int>(std::string_view(text).substr(dots + 2), "sizes");
    if (lo > hi) {
      throw ParseError("sizes: empty range '" + text + "'");
    }
    for (int s = lo; s <= hi; ++s) {
      sizes.push_back(s);
    }
    return sizes;
  }
  for (const auto part : csv::split(text)) {
    sizes.push_back(csv::parse_int<int>(part, "sizes"));
  }
  return sizes;
}

}  // namespace farsec
