#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pricebounds::csv {

/// 17 significant digits, enough to round-trip any double. NaN is written
/// as "nan" and infinities as "inf"/"-inf".
std::string format_double(double value);

/// Splits one line on commas. Fields are never quoted in our files.
std::vector<std::string> split(std::string_view line);

/// Parses a full field as a double ("nan" and "inf" accepted); throws
/// ContractViolation on trailing garbage.
double parse_double(const std::string& field);
long long parse_int(const std::string& field);
unsigned long long parse_uint(const std::string& field);

}  // namespace pricebounds::csv
