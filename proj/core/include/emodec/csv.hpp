#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emodec::csv {

/// Minimal comma-separated table: header plus data rows, no quoting.
/// Blank lines are skipped; `line_numbers[i]` is the 1-based file line of `rows[i]`.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;

  /// Index of the named column; throws SchemaError naming the column when absent.
  std::size_t require_column(std::string_view name) const;
};

Table parse(std::string_view text, std::string_view source_name);
Table read(const std::filesystem::path& path);

/// Parses a finite double; throws SchemaError carrying `row` and `column` otherwise.
double parse_finite(std::string_view field, int row, std::string_view column);

std::string join(const std::vector<std::string>& fields);

}  // namespace emodec::csv
