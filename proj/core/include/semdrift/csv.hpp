#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semdrift::csv {

// RFC 4180 field splitting for one physical line (no embedded newlines).
std::vector<std::string> split_line(std::string_view line, char sep = ',');

// Quotes a field only if it contains a separator, quote or newline.
std::string escape(std::string_view field, char sep = ',');

// Locale-independent shortest round-trip formatting of a double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);

}  // namespace semdrift::csv
