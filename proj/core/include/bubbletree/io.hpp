#pragma once

#include <string>
#include <vector>

#include "bubbletree/grid.hpp"

namespace bubbletree {

// Fixed shortest-roundtrip formatting; CSV and JSON output never depend on
// the locale.
std::string format_double(double v);

// Binary field dump: `base`.btf holds the payload (header + row-major
// doubles per chart), `base`.json the grid parameters and metadata.
void dump_field(const Field& f, const std::string& base_path);
Field load_field(const std::string& base_path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void row_values(const std::vector<double>& values);
  void flush();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace bubbletree
