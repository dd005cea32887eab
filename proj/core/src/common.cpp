#include "semdrift/common.hpp"

#include <charconv>
#include <cstdio>

namespace semdrift {

std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.empty() || s.size() > 16 || ec != std::errc{} ||
      p != s.data() + s.size()) {
    throw FormatError("bad 64-bit hex value '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace semdrift
