#pragma once

#include "dhc/common/time.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dhc::io {

struct CsvRow {
    std::size_t line = 0;              ///< 1-based
    std::vector<std::string> fields;
    std::vector<std::size_t> columns;  ///< 1-based column of each field's first character
};

/// Comma-separated text with '#' comment lines, a header row and optional
/// double-quoted fields. The first comment of the form "# schema: ..." is kept.
struct CsvDocument {
    std::string source;
    std::string schema;
    std::vector<std::string> header;
    std::size_t header_line = 0;
    std::vector<CsvRow> rows;

    /// Index of a header column; throws InputError naming the file when absent.
    std::size_t column(std::string_view name) const;
    /// Throws unless the header starts with exactly these names.
    void require_header(const std::vector<std::string>& names) const;

    double number(const CsvRow& row, std::size_t col) const;
    long long integer(const CsvRow& row, std::size_t col) const;
    Timestamp timestamp(const CsvRow& row, std::size_t col) const;
    const std::string& text(const CsvRow& row, std::size_t col) const;
    /// "source:line:column: message"
    [[noreturn]] void fail(const CsvRow& row, std::size_t col, std::string_view message) const;
};

/// Throws InputError with line and column on unterminated quotes or a row
/// whose width differs from the header.
CsvDocument parse_csv(std::string_view text, std::string source = "<memory>");
CsvDocument read_csv(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Builds CSV text with the schema comment and header up front.
class CsvWriter {
public:
    CsvWriter(std::string_view schema, const std::vector<std::string>& header);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(Timestamp t) { return field(format_rfc3339(t)); }
    CsvWriter& empty() { return field(std::string_view{}); }
    void end_row();

    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::size_t width_ = 0;
    std::size_t in_row_ = 0;
};

}  // namespace dhc::io
