#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace funreg {

// Doubles print with 17 significant digits so that emitted files parse
// back to bit-identical values.
std::string format_double(double v);

class CsvFile {
 public:
  explicit CsvFile(const std::string& path);
  void write_row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;  // 1-based source line of each row
};

CsvTable read_csv(const std::string& path);

// Parses a full double (no trailing junk); reports file and line on failure.
double parse_double_cell(const CsvTable& table, std::size_t row,
                         std::size_t col);

bool try_parse_double(const std::string& text, double& out);

}  // namespace funreg
