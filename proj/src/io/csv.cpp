#include "dhc/io/csv.hpp"

#include "dhc/common/error.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dhc::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

CsvRow split_line(std::string_view line, std::size_t line_no, const std::string& source) {
    CsvRow row;
    row.line = line_no;
    std::size_t i = 0;
    for (;;) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        row.columns.push_back(i + 1);
        std::string field;
        if (i < line.size() && line[i] == '"') {
            const auto open = i++;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    closed = true;
                    ++i;
                    break;
                }
                field += line[i++];
            }
            if (!closed) {
                throw InputError(fmt::format("{}:{}:{}: unterminated quoted field", source, line_no, open + 1));
            }
            while (i < line.size() && line[i] != ',') {
                if (line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                    throw InputError(fmt::format("{}:{}:{}: unexpected character after quoted field", source,
                                                 line_no, i + 1));
                }
                ++i;
            }
        } else {
            const auto end = line.find(',', i);
            field = std::string(trim(line.substr(i, end == std::string_view::npos ? line.npos : end - i)));
            i = end == std::string_view::npos ? line.size() : end;
        }
        row.fields.push_back(std::move(field));
        if (i >= line.size()) {
            break;
        }
        ++i;  // comma
    }
    return row;
}

}  // namespace

CsvDocument parse_csv(std::string_view text, std::string source) {
    CsvDocument doc;
    doc.source = std::move(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        const auto t = trim(line);
        if (t.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (t.front() == '#') {
            constexpr std::string_view key = "# schema:";
            if (doc.schema.empty() && t.substr(0, key.size()) == key) {
                doc.schema = std::string(trim(t.substr(key.size())));
            }
            continue;
        }
        auto row = split_line(line, line_no, doc.source);
        if (doc.header.empty()) {
            doc.header = std::move(row.fields);
            doc.header_line = line_no;
            continue;
        }
        if (row.fields.size() != doc.header.size()) {
            throw InputError(fmt::format("{}:{}:1: expected {} fields, found {}", doc.source, line_no,
                                         doc.header.size(), row.fields.size()));
        }
        doc.rows.push_back(std::move(row));
        if (end == text.size()) break;
    }
    if (doc.header.empty()) {
        throw InputError(fmt::format("{}: no header row", doc.source));
    }
    return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

std::size_t CsvDocument::column(std::string_view name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) return c;
    }
    throw InputError(fmt::format("{}:{}: missing column '{}'", source, header_line, name));
}

void CsvDocument::require_header(const std::vector<std::string>& names) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c >= header.size() || header[c] != names[c]) {
            std::string want;
            for (const auto& n : names) want += (want.empty() ? "" : ",") + n;
            throw InputError(fmt::format("{}:{}:{}: header must start with '{}'", source, header_line, c + 1, want));
        }
    }
}

void CsvDocument::fail(const CsvRow& row, std::size_t col, std::string_view message) const {
    throw InputError(fmt::format("{}:{}:{}: {}", source, row.line, row.columns.at(col), message));
}

const std::string& CsvDocument::text(const CsvRow& row, std::size_t col) const { return row.fields.at(col); }

double CsvDocument::number(const CsvRow& row, std::size_t col) const {
    const auto& f = row.fields.at(col);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        fail(row, col, fmt::format("'{}' in column '{}' is not a number", f, header[col]));
    }
    return v;
}

long long CsvDocument::integer(const CsvRow& row, std::size_t col) const {
    const auto& f = row.fields.at(col);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        fail(row, col, fmt::format("'{}' in column '{}' is not an integer", f, header[col]));
    }
    return v;
}

Timestamp CsvDocument::timestamp(const CsvRow& row, std::size_t col) const {
    try {
        return parse_rfc3339(row.fields.at(col));
    } catch (const InputError& e) {
        fail(row, col, e.what());
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // shortest text that parses back to the same double
    return fmt::format("{}", v);
}

CsvWriter::CsvWriter(std::string_view schema, const std::vector<std::string>& header) : width_(header.size()) {
    out_ = fmt::format("# schema: {}\n", schema);
    for (const auto& h : header) field(h);
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
    if (in_row_++ > 0) out_ += ',';
    if (s.find_first_of(",\"\n") != std::string_view::npos) {
        out_ += '"';
        for (char c : s) {
            if (c == '"') out_ += '"';
            out_ += c;
        }
        out_ += '"';
    } else {
        out_ += s;
    }
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(fmt::format("{}", v))); }

void CsvWriter::end_row() {
    if (in_row_ != width_) {
        throw Error(fmt::format("CSV row has {} fields, header has {}", in_row_, width_));
    }
    out_ += '\n';
    in_row_ = 0;
}

}  // namespace dhc::io
