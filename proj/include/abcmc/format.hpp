#pragma once

#include <charconv>
#include <cmath>
#include <string>

#include "abcmc/errors.hpp"

namespace abcmc {

// Shortest decimal form that round-trips to the exact double. Infinities
// serialize as "inf"/"-inf" since JSON and CSV lack a literal for them.
inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto res =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DomainError("cannot parse number '" + text + "'");
  }
  return value;
}

}  // namespace abcmc
