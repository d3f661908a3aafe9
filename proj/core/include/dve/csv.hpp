#pragma once

#include <cstdio>
#include <string>

namespace dve {

/// Shortest-17-significant-digit rendering; round-trips doubles exactly and
/// is byte-stable for identical inputs.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace dve
