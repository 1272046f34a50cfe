#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace narrative::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Replaces every run of whitespace (including newlines) with one space and trims.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Fixed-point formatting with a locale-independent '.' separator.
std::string fixed(double value, int decimals);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based file line of each row (header is line 1).
  std::vector<std::size_t> lines;

  /// Index of `name` in the header; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
};

/// RFC-4180-ish reader: comma separated, double-quote escaping, header row required.
/// Blank lines are skipped. Rows whose width differs from the header raise ParseError.
CsvTable read_csv(std::istream& in);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace narrative::text
