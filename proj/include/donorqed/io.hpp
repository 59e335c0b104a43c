#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace donorqed::io {

/// Shortest round-trip representation in scientific notation. Output is
/// byte-stable for identical inputs.
std::string format_double(double v);

/// Write a CSV with the given header and equally sized columns.
void write_columns(std::ostream& os, std::span<const std::string> header,
                   std::span<const std::vector<double>> columns);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name, or -1.
  int column(std::string_view name) const;
};

/// Parse a numeric CSV with a single header line. Throws std::runtime_error
/// on ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& is);

}  // namespace donorqed::io
