#include "pricebounds/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pricebounds/errors.hpp"

namespace pricebounds::csv {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field) {
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  require(!field.empty() && end == field.c_str() + field.size(),
          "csv: not a number: '" + field + "'");
  return value;
}

long long parse_int(const std::string& field) {
  char* end = nullptr;
  const long long value = std::strtoll(field.c_str(), &end, 10);
  require(!field.empty() && end == field.c_str() + field.size(),
          "csv: not an integer: '" + field + "'");
  return value;
}

unsigned long long parse_uint(const std::string& field) {
  char* end = nullptr;
  const unsigned long long value = std::strtoull(field.c_str(), &end, 10);
  require(!field.empty() && field[0] != '-' && end == field.c_str() + field.size(),
          "csv: not an unsigned integer: '" + field + "'");
  return value;
}

}  // namespace pricebounds::csv
