#include "mdl/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>

namespace mdl {

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty()) {
        throw InvalidInput("stray quote in CSV line " + std::to_string(line_no));
      }
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw InvalidInput("unterminated quote in CSV line " + std::to_string(line_no));
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

CsvTable CsvTable::read_stream(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::vector<std::string> fields = split_line(line, line_no);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw InvalidInput("CSV line " + std::to_string(line_no) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw InvalidInput("CSV input needs a header row");
  return table;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_stream(in);
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<int>(j);
  }
  throw InvalidInput("no column named '" + name + "'");
}

CategoricalColumn categorical_column(const CsvTable& table, int column) {
  if (column < 0 || column >= static_cast<int>(table.header.size())) {
    throw InvalidInput("column index out of range");
  }
  CategoricalColumn out;
  std::map<std::string, int> codes;
  out.values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const std::string& cell = row[column];
    auto [it, fresh] = codes.try_emplace(cell, static_cast<int>(out.levels.size()));
    if (fresh) out.levels.push_back(cell);
    out.values.push_back(it->second);
  }
  return out;
}

std::vector<double> real_column(const CsvTable& table, int column) {
  if (column < 0 || column >= static_cast<int>(table.header.size())) {
    throw InvalidInput("column index out of range");
  }
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string& cell = table.rows[i][column];
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
      throw InvalidInput("row " + std::to_string(i + 1) + " column '" +
                         table.header[column] + "' is not numeric: '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace mdl
