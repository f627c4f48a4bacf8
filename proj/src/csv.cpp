#include "mfdr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mfdr/errors.hpp"

namespace mfdr {

int CsvTable::column(const std::string& name) const {
  for (int j = 0; j < n_cols(); ++j) {
    if (header[j] == name) return j;
  }
  throw InvalidInput("column '" + name + "' not found in CSV header");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidInput("missing value at " + context);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw InvalidInput("non-numeric value '" + t + "' at " + context);
  if (!std::isfinite(v))
    throw InvalidInput("non-finite value '" + t + "' at " + context);
  return v;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput("empty file (header row required): " + path);
  for (const auto& h : split_line(line)) {
    const std::string name = trim(h);
    if (name.empty())
      throw InvalidInput("empty column name in header of " + path);
    table.header.push_back(name);
  }
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty() && in.eof()) break;  // trailing newline
    const auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw InvalidInput("ragged row " + std::to_string(row_no) + " in " +
                         path + ": expected " +
                         std::to_string(table.header.size()) + " cells, got " +
                         std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (size_t j = 0; j < cells.size(); ++j) {
      row[j] = parse_double(cells[j], path + " row " + std::to_string(row_no) +
                                          " column '" + table.header[j] + "'");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << content;
  if (!out) throw InvalidInput("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mfdr
