#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trajsurv::csv {

/// Splits one CSV line into fields. Handles RFC 4180 double-quoted fields
/// (with "" escapes); a trailing '\r' is stripped.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Fixed-point formatting with `digits` decimals, "inf" for +infinity.
std::string fixed(double value, int digits = 6);

}  // namespace trajsurv::csv
