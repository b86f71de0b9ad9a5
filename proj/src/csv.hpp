#pragma once

// Line-oriented CSV helpers shared by the resources, requests and SLA
// readers. The formats are unquoted and whitespace-strict.

#include <charconv>
#include <istream>
#include <iterator>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "farsec/error.hpp"

namespace farsec::csv {

/// Splits `text` into lines. A single trailing newline is allowed; any other
/// empty line is an error.
inline std::vector<std::string_view> lines(std::string_view text, std::string_view what) {
  std::vector<std::string_view> out;
  if (text.empty()) {
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    out.push_back(text.substr(pos, end - pos));
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].empty()) {
      throw ParseError(std::string(what) + ": empty line " + std::to_string(i + 1));
    }
  }
  return out;
}

inline std::string slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

/// Parses a decimal integer spanning the whole field.
template <typename T>
T parse_int(std::string_view field, std::string_view what) {
  static_assert(std::is_integral_v<T>);
  T value{};
  if (field.empty()) {
    throw ParseError(std::string(what) + ": empty value");
  }
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (*first == '+') {
    throw ParseError(std::string(what) + ": bad integer '" + std::string(field) + "'");
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(std::string(what) + ": out of range '" + std::string(field) + "'");
  }
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string(what) + ": bad integer '" + std::string(field) + "'");
  }
  return value;
}

inline std::string where(std::string_view file, std::size_t line_no) {
  return std::string(file) + " line " + std::to_string(line_no);
}

}  // namespace farsec::csv
