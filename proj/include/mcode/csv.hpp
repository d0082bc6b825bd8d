#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC 4180 helpers: fields containing a comma, quote or line break
// are quoted, with embedded quotes doubled.
namespace mcode::csv {

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);
std::vector<std::string> parse_row(std::string_view line);

// Fixed-point with the given number of decimals; "-0.000000" prints as "0.000000".
std::string fixed(double value, int decimals);

}  // namespace mcode::csv
