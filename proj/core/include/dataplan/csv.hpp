#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dataplan {

/// Shortest decimal text that round-trips to the same double, '.' separator.
std::string format_number(double value);

/// Comma-separated table with a header row. Fields are never quoted; none of
/// the emitted values contain commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::runtime_error when absent.
  std::size_t column(std::string_view name) const;
  std::string to_string() const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes bytes verbatim (binary mode, so LF stays LF).
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace dataplan
