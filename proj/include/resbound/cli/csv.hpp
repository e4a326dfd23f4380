#pragma once

// Comma-separated tables with '#'-prefixed metadata lines above one header row.
// Numbers use the shortest decimal form that reads back to the same double.

#include <string>
#include <string_view>
#include <vector>

namespace resbound::cli {

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);
/// Inverse of format_number. Throws std::invalid_argument on malformed text.
double parse_number(std::string_view text);

struct CsvTable {
  std::vector<std::string> metadata;  ///< lines without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
};

std::string to_csv(const CsvTable& table);
/// Throws std::invalid_argument when a row's width differs from the header.
CsvTable parse_csv(std::string_view text);

/// Writes text to path, failing if the file exists and overwrite is false.
void write_file(const std::string& path, const std::string& text, bool overwrite);
std::string read_file(const std::string& path);

}  // namespace resbound::cli
