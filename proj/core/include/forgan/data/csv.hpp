#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace forgan::data {

/// A CSV column chosen by zero-based index or by header name.
using ColumnSelector = std::variant<std::size_t, std::string>;

/// Parses a selector from text: all digits -> index, anything else -> name.
ColumnSelector parse_column_selector(std::string_view text);

/// Reads one numeric column as an ordered series.
///
/// Selecting by name requires a header row. Selecting by index treats the first line as a
/// header only when that field is not numeric. Blank lines are skipped. Throws DataError
/// naming the file and 1-based line for missing files, missing columns, and unparsable values.
std::vector<double> ingest_csv_series(const std::filesystem::path& path, const ColumnSelector& column = std::size_t{0});

/// Splits one CSV line on commas, trimming whitespace and surrounding double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strict full-field parse of a double.
std::optional<double> parse_double(std::string_view text);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace forgan::data
