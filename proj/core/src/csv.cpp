#include "emodec/csv.hpp"

#include <charconv>
#include <cmath>

#include "emodec/error.hpp"
#include "emodec/io_util.hpp"

namespace emodec::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(trim(line.substr(start)));
      break;
    }
    out.emplace_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::size_t Table::require_column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw SchemaError("missing column '" + std::string(name) + "'", 1);
}

Table parse(std::string_view text, std::string_view source_name) {
  Table table;
  int line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw SchemaError("expected " + std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no);
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw SchemaError("empty CSV: " + std::string(source_name));
  return table;
}

Table read(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

double parse_finite(std::string_view field, int row, std::string_view column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw SchemaError("unparsable number '" + std::string(field) + "' in column '" + std::string(column) + "'",
                      row);
  }
  if (!std::isfinite(value)) {
    throw SchemaError("non-finite value in column '" + std::string(column) + "'", row);
  }
  return value;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace emodec::csv
