#pragma once

#include <cstdio>
#include <string>

namespace powertalk {

// Shortest round-trippable-for-our-purposes decimal form, C locale, no
// locale-dependent separators.  Used for CSV cells and RNG stream labels, so
// the exact digits are part of the reproducibility contract.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

inline std::string format_double(double value, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
  return buf;
}

}  // namespace powertalk
