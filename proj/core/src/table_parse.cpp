#include "table_parse.hpp"

#include <fstream>
#include <sstream>

#include "signrec/errors.hpp"

namespace signrec::detail {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

static std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) cells.push_back("");
  return cells;
}

Table parse_table_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (!have_header) {
      table.delimiter = delimiter != '\0' ? delimiter
                        : (line.find('\t') != std::string::npos ? '\t' : ',');
      table.header = split_line(line, table.delimiter);
      have_header = true;
      continue;
    }
    table.rows.push_back(split_line(line, table.delimiter));
  }
  if (!have_header) throw DataError("empty file: " + path);
  if (table.rows.empty()) throw DataError("no data rows in: " + path);
  return table;
}

}  // namespace signrec::detail
