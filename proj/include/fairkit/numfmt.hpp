#pragma once

#include <charconv>
#include <string>

namespace fairkit {

/// Shortest decimal representation that round-trips to the same double.
/// Used for every number the tool writes outside of JSON (CSV cells, SVG
/// coordinates) so that rendered output is reproducible byte for byte.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace fairkit
