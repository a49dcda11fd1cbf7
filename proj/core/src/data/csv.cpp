#include "forgan/data/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "forgan/error.hpp"

namespace forgan::data {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

ColumnSelector parse_column_selector(std::string_view text) {
    if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        std::size_t idx = 0;
        std::from_chars(text.data(), text.data() + text.size(), idx);
        return idx;
    }
    return std::string(text);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> ingest_csv_series(const std::filesystem::path& path, const ColumnSelector& column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");

    std::vector<double> series;
    std::optional<std::size_t> col;
    if (const auto* idx = std::get_if<std::size_t>(&column)) col = *idx;

    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (first) {
            first = false;
            if (const auto* name = std::get_if<std::string>(&column)) {
                const auto it = std::find(fields.begin(), fields.end(), *name);
                if (it == fields.end()) {
                    throw DataError("CSV file '" + path.string() + "' has no column named '" + *name + "'");
                }
                col = static_cast<std::size_t>(it - fields.begin());
                continue;
            }
            if (*col < fields.size() && !parse_double(fields[*col])) continue;  // header row
        }
        if (*col >= fields.size()) {
            throw DataError("CSV file '" + path.string() + "' line " + std::to_string(line_no) + " has no column " +
                            std::to_string(*col));
        }
        const auto v = parse_double(fields[*col]);
        if (!v) {
            throw DataError("CSV file '" + path.string() + "' line " + std::to_string(line_no) +
                            ": cannot parse '" + fields[*col] + "' as a number");
        }
        series.push_back(*v);
    }
    if (first && std::holds_alternative<std::string>(column)) {
        throw DataError("CSV file '" + path.string() + "' is empty");
    }
    return series;
}

}  // namespace forgan::data
