#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

namespace pkgprof::detail {

// getline that also drops a trailing CR.
inline bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Decimal digits only; no sign, no whitespace, no overflow.
inline std::optional<std::uint64_t> parse_count(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Splits "head,a,b,c" into {head, a, b, c} using the last three commas.
inline std::optional<std::array<std::string_view, 4>> split_last3(
    std::string_view line) {
  std::array<std::string_view, 4> out;
  std::size_t end = line.size();
  for (int field = 3; field >= 1; --field) {
    if (end == 0) return std::nullopt;
    auto comma = line.rfind(',', end - 1);
    if (comma == std::string_view::npos) return std::nullopt;
    out[field] = line.substr(comma + 1, end - comma - 1);
    end = comma;
  }
  out[0] = line.substr(0, end);
  return out;
}

inline bool is_absolute(std::string_view path) {
  return !path.empty() && path.front() == '/';
}

}  // namespace pkgprof::detail
