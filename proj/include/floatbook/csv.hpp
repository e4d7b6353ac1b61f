#pragma once

#include "floatbook/errors.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal CSV support for the file formats this project defines: comma
// separated, header row, no quoting, '.' decimal separator.
namespace floatbook::csv {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            break;
        }
        fields.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

struct Row {
    std::vector<std::string> fields;
    size_t line_number = 0;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

// Reads header + data rows. Blank lines are skipped; every data row must
// have exactly as many fields as the header.
inline Table read_table(std::istream& in, std::string_view source_name) {
    Table table;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InputError(std::string(source_name) + ":" + std::to_string(line_number) +
                             ": expected " + std::to_string(table.header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(Row{std::move(fields), line_number});
    }
    if (table.header.empty()) {
        throw InputError(std::string(source_name) + ": empty file (missing header row)");
    }
    return table;
}

// Column index by header name, or nullopt if the column is absent.
inline std::optional<size_t> find_column(const Table& table, std::string_view name) {
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return i;
    }
    return std::nullopt;
}

// Strict double parse: the whole field must be consumed.
inline double parse_double(std::string_view field, std::string_view source_name,
                           size_t line_number, std::string_view column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw InputError(std::string(source_name) + ":" + std::to_string(line_number) +
                         ": cannot parse '" + std::string(field) + "' as number for column '" +
                         std::string(column) + "'");
    }
    return value;
}

} // namespace floatbook::csv
