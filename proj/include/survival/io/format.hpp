#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <system_error>

namespace survival::io {

/// Shortest decimal that round-trips to the same double (at most 17
/// significant digits). Output is independent of locale and stream state.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  // Plain notation would spell out more than 17 digits for large non-round values.
  const auto [end, ec] = std::abs(x) >= 1e17
                             ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific)
                             : std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, end);
}

}  // namespace survival::io
