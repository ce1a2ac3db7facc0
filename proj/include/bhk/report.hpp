#pragma once

// Tabular experiment reports rendered as CSV (records only) or JSON
// (schema version, kind, config, summary, records). Floats are printed with
// 17 significant digits so every double survives a text round trip.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "bhk/error.hpp"

namespace bhk {

inline constexpr int kReportSchemaVersion = 1;

using Cell = std::variant<double, std::int64_t, bool, std::string>;
using Fields = std::vector<std::pair<std::string, Cell>>;

struct Report {
    std::string kind;
    Fields config;
    Fields summary;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw UsageError("Report: row width differs from column count");
        rows.push_back(std::move(row));
    }
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

inline std::string json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return std::isfinite(v) ? format_double(v) : "null";
            else if constexpr (std::is_same_v<T, std::int64_t>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return json_string(v);
        },
        c);
}

inline std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, std::int64_t>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else {
                if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
                std::string out = "\"";
                for (char ch : v) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                return out + "\"";
            }
        },
        c);
}

inline std::string json_object(const Fields& f) {
    std::string out = "{";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += ",";
        out += json_string(f[i].first) + ":" + json_cell(f[i].second);
    }
    return out + "}";
}

}  // namespace detail

/// Renders the report as "csv" or "json". Identical reports give identical
/// bytes.
inline std::string emit_report(const Report& r, std::string_view format) {
    if (format != "csv" && format != "json") throw UsageError("emit_report: unknown format '" + std::string(format) + "'");
    if (r.rows.empty()) throw UsageError("emit_report: no records");
    std::string out;
    if (format == "csv") {
        for (std::size_t i = 0; i < r.columns.size(); ++i) {
            if (i) out += ',';
            out += detail::csv_cell(r.columns[i]);
        }
        out += '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += detail::csv_cell(row[i]);
            }
            out += '\n';
        }
        return out;
    }
    out = "{\"schema_version\":" + std::to_string(kReportSchemaVersion) + ",\"kind\":" + detail::json_string(r.kind) +
          ",\"config\":" + detail::json_object(r.config) + ",\"summary\":" + detail::json_object(r.summary) +
          ",\"records\":[";
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        if (k) out += ",";
        out += "{";
        for (std::size_t i = 0; i < r.columns.size(); ++i) {
            if (i) out += ",";
            out += detail::json_string(r.columns[i]) + ":" + detail::json_cell(r.rows[k][i]);
        }
        out += "}";
    }
    out += "]}\n";
    return out;
}

/// CSV as read back: header plus raw string fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw UsageError("CsvTable: no column '" + std::string(name) + "'");
    }
    double number(std::size_t row, std::string_view name) const {
        const std::string& s = rows.at(row).at(column(name));
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') throw UsageError("CsvTable: '" + s + "' is not a number");
        return v;
    }
};

inline CsvTable load_csv(std::string_view text) {
    CsvTable t;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, in_record = false;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        if (t.header.empty())
            t.header = std::move(record);
        else
            t.rows.push_back(std::move(record));
        record.clear();
        in_record = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        in_record = true;
        if (c == '"')
            quoted = true;
        else if (c == ',')
            end_field();
        else if (c == '\n')
            end_record();
        else if (c != '\r')
            field += c;
    }
    if (quoted) throw UsageError("load_csv: unterminated quoted field");
    if (in_record) end_record();
    for (const auto& row : t.rows)
        if (row.size() != t.header.size()) throw UsageError("load_csv: ragged row");
    return t;
}

}  // namespace bhk
