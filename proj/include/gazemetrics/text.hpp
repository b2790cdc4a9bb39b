#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gazemetrics {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Fixed-point text with `digits` decimals, used where byte-stable output
// matters more than round-tripping.
std::string format_fixed(double v, int digits);

std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace gazemetrics
