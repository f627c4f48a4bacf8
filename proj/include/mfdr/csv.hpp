#pragma once

#include <string>
#include <vector>

namespace mfdr {

// Numeric table read from CSV: one header row, then rows of decimal-point
// numbers.  Ragged rows, empty cells, and non-numeric or non-finite values
// are rejected with the offending row/column named.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_cols() const { return static_cast<int>(header.size()); }
  // column index for a header name; throws InvalidInput when absent
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Shortest decimal string that parses back to exactly the same double.
// NaN renders as "nan" (used for undefined table entries).
std::string format_double(double v);

// parse helper with the same strictness as read_csv cells
double parse_double(const std::string& text, const std::string& context);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mfdr
