#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace lab {

/// One CSV cell; numbers are rendered with 17 significant digits.
struct Cell {
  std::string text;
  Cell(double v);
  Cell(int v);
  Cell(std::size_t v);
  Cell(bool v);
  Cell(const char* s) : text(s) {}
  Cell(std::string s) : text(std::move(s)) {}
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit Table(std::vector<std::string> columns = {}) : header(std::move(columns)) {}
  void add(std::initializer_list<Cell> cells);
  std::string to_csv() const;
};

/// Writes UTF-8 CSV with a header row and LF line endings. I/O failures throw
/// std::runtime_error naming the path.
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);

void write_text(const std::string& path, const std::string& text);

}  // namespace lab
