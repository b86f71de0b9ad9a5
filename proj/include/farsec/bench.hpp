#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "farsec/instance_gen.hpp"

namespace farsec {

struct BenchRow {
  int size = 0;
  std::size_t flows = 0;
  std::size_t admitted = 0;
  double seconds = 0.0;  // wall time of one solve, SLA evaluation included
};

/// Generates one instance per size from `base` (size overridden) and times
/// solving it. Instance generation is not timed.
std::vector<BenchRow> run_bench(const std::vector<int>& sizes, const GenConfig& base);

/// Times a single solve of an already generated instance.
BenchRow time_instance(const GeneratedInstance& inst);

/// "size,flows,admitted,seconds". `with_timing = false` drops the seconds
/// column, leaving only seed-determined values.
std::string format_bench(const std::vector<BenchRow>& rows, bool with_timing = true);

/// Parses "a..b" (inclusive) or a comma-separated list of sizes.
std::vector<int> parse_sizes(const std::string& text);

}  // namespace farsec
