#include "lab/table.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lab/config.hpp"

namespace lab {

Cell::Cell(double v) : text(format_double(v)) {}
Cell::Cell(int v) : text(std::to_string(v)) {}
Cell::Cell(std::size_t v) : text(std::to_string(v)) {}
Cell::Cell(bool v) : text(v ? "true" : "false") {}

void Table::add(std::initializer_list<Cell> cells) {
  if (cells.size() != header.size()) throw std::logic_error("row width does not match the header");
  std::vector<std::string> row;
  for (const auto& c : cells) row.push_back(c.text);
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const Table& t) { write_text(path, t.to_csv()); }

Table parse_csv(const std::string& text) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace lab
