#pragma once

#include <string>
#include <string_view>

namespace trackref {

// Shortest round-trip decimal for a double ('.' separator, no locale).
// parse(format(v)) == v bit-exactly, which keeps file I/O reproducible
// across writers.
std::string format_real(double v);

// Strict parse of a full token; throws ParseError on trailing garbage.
double parse_real(std::string_view s);
long parse_int(std::string_view s);

}  // namespace trackref
