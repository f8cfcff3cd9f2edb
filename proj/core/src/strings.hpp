#pragma once

#include <cstdio>
#include <string>

namespace ergodic {

// Shortest round-trip-ish rendering for messages; CSV output uses 17 digits.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace ergodic
