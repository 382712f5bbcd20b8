#include "funreg/csv.hpp"

#include <cstdio>
#include <cstdlib>

#include "funreg/errors.hpp"

namespace funreg {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

CsvFile::CsvFile(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
}

void CsvFile::write_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed for " + path_);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");

  CsvTable table;
  table.path = path;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      table.rows.push_back(std::move(cells));
      table.line_numbers.push_back(line_number);
    }
  }
  if (table.header.empty()) throw IngestError(path + ": file has no header row");
  return table;
}

bool try_parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

double parse_double_cell(const CsvTable& table, std::size_t row,
                         std::size_t col) {
  const std::string& text = table.rows[row][col];
  double v;
  if (!try_parse_double(text, v))
    throw IngestError(table.path + ":" + std::to_string(table.line_numbers[row]) +
                      ": non-numeric value '" + text + "' in column '" +
                      (col < table.header.size() ? table.header[col]
                                                 : std::to_string(col)) +
                      "'");
  return v;
}

}  // namespace funreg
