#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace lamsmooth {

// Shortest round-trip decimal form; identical input gives identical text.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace lamsmooth
