#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace emodec {

/// Writes `content` to a sibling temp file and renames it over `path`, so readers
/// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

/// Shortest text form that parses back to the same double.
std::string format_double(double value);

}  // namespace emodec
