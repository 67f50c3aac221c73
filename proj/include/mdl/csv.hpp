#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mdl/errors.hpp"

namespace mdl {

// Minimal RFC-4180-style table: comma separated, double-quote escaping,
// header row required.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read_stream(std::istream& in);
  static CsvTable read_file(const std::string& path);

  int column_index(const std::string& name) const;  // throws when absent
};

// Categorical view of a column: codes assigned by first appearance.
struct CategoricalColumn {
  std::vector<int> values;
  std::vector<std::string> levels;
};

CategoricalColumn categorical_column(const CsvTable& table, int column);

std::vector<double> real_column(const CsvTable& table, int column);

}  // namespace mdl
