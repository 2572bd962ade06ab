#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvmed::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a whole cell; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

/// Splits one CSV record. Double-quoted fields with "" escapes are accepted;
/// a trailing CR is dropped.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a CSV with a header into rows of strings. Rows whose field count
/// differs from the header raise MalformedInput.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position by name; throws MalformedInput when absent.
  std::size_t column(const std::string& name) const;
  std::optional<std::size_t> find_column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Writes `contents` to `path` through a temporary sibling file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tvmed::io
