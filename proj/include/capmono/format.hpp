#ifndef CAPMONO_FORMAT_HPP
#define CAPMONO_FORMAT_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace capmono {

/// Shortest round-trip decimal for a double, locale independent.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace capmono

#endif  // CAPMONO_FORMAT_HPP
