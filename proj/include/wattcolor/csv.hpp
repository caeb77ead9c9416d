#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wattcolor {

// Minimal comma-separated reader for the project's own file formats: no
// quoting, surrounding whitespace trimmed, blank lines skipped.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws MalformedDataError if absent.
  std::size_t column(std::string_view name) const;
  void require_columns(const std::vector<std::string_view>& names) const;
};

// Throws InputError naming the file if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

// Throws InputError naming the source for a missing or empty file.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string source);

double parse_double(std::string_view field, std::string_view context);
long parse_long(std::string_view field, std::string_view context);

// Identifier fields are written unquoted; throws InputError if `value`
// holds a comma or line break.
void require_plain_field(std::string_view value, std::string_view what);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace wattcolor
