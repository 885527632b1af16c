#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace occulstm {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// 17 significant digits, the checkpoint representation. Also round-trips
// bit-exactly, but with a fixed width instead of the shortest one.
inline std::string format_double17(double v) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace occulstm
