#pragma once

#include <charconv>
#include <string>

namespace hetsched::detail {

// Shortest round-trip decimal form, independent of locale and stream state.
inline std::string format_double(double value) {
  char buf[32];
  auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace hetsched::detail
