#pragma once

// Record CSV: header "rep_index,p_one,p_two,pop_one,pop_two,<family fields>",
// one row per record, numbers at 17 significant digits, RFC-4180 quoting.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "popeq/error.hpp"
#include "popeq/harness/scenario.hpp"

namespace popeq {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string quote_csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline const std::vector<std::string>& record_base_columns() {
    static const std::vector<std::string> cols = {"rep_index", "p_one", "p_two", "pop_one", "pop_two"};
    return cols;
}

inline void write_records_csv(std::ostream& out, const std::vector<std::string>& field_names,
                              const std::vector<ReplicationRecord>& records) {
    bool first = true;
    for (const auto& c : record_base_columns()) {
        out << (first ? "" : ",") << quote_csv_field(c);
        first = false;
    }
    for (const auto& f : field_names) out << ',' << quote_csv_field(f);
    out << '\n';
    for (const ReplicationRecord& r : records) {
        if (r.fields.size() != field_names.size()) throw DomainError("write_records_csv: field count mismatch");
        out << r.rep_index << ',' << format_double(r.p_one) << ',' << format_double(r.p_two) << ','
            << format_double(r.pop_one) << ',' << format_double(r.pop_two);
        for (double v : r.fields) out << ',' << format_double(v);
        out << '\n';
    }
}

/// Splits a CSV stream into rows of fields. Quoted fields may contain
/// separators, doubled quotes and line breaks. Each row remembers the line
/// it started on.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    bool next(std::vector<std::string>& row) {
        row.clear();
        int c = in_.get();
        if (c == EOF) return false;
        row_line_ = ++line_;
        std::string field;
        bool quoted = false;
        bool after_quote = false;
        for (;; c = in_.get()) {
            if (quoted) {
                if (c == EOF) throw ParseError("unterminated quoted field", row_line_);
                if (c == '"') {
                    if (in_.peek() == '"') {
                        field += '"';
                        in_.get();
                    } else {
                        quoted = false;
                        after_quote = true;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += static_cast<char>(c);
                }
                continue;
            }
            if (c == ',' ) {
                row.push_back(std::move(field));
                field.clear();
                after_quote = false;
            } else if (c == '\n' || c == EOF) {
                row.push_back(std::move(field));
                return true;
            } else if (c == '\r') {
                if (in_.peek() == '\n') continue;
                row.push_back(std::move(field));
                return true;
            } else if (c == '"' && field.empty() && !after_quote) {
                quoted = true;
            } else {
                if (after_quote) throw ParseError("characters after closing quote", row_line_);
                field += static_cast<char>(c);
            }
        }
    }

    long line() const { return row_line_; }

private:
    std::istream& in_;
    long line_ = 0;
    long row_line_ = 0;
};

struct RecordTable {
    std::vector<std::string> field_names;
    std::vector<ReplicationRecord> records;
};

inline double parse_csv_number(const std::string& s, long line, const std::string& column) {
    if (s.empty()) throw ParseError("empty value in column '" + column + "'", line);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ParseError("invalid number '" + s + "' in column '" + column + "'", line);
    }
    return v;
}

inline RecordTable read_records_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw ParseError("missing header", 1);
    const auto& base = record_base_columns();
    if (row.size() < base.size()) throw ParseError("header must start with rep_index,p_one,p_two,pop_one,pop_two", 1);
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (row[i] != base[i]) throw ParseError("unexpected header column '" + row[i] + "'", 1);
    }
    RecordTable table;
    table.field_names.assign(row.begin() + static_cast<std::ptrdiff_t>(base.size()), row.end());
    const std::vector<std::string> header = row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;  // blank line
        const long line = reader.line();
        if (row.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(row.size()), line);
        }
        ReplicationRecord r;
        const double index = parse_csv_number(row[0], line, header[0]);
        r.rep_index = static_cast<std::int64_t>(index);
        if (static_cast<double>(r.rep_index) != index) throw ParseError("rep_index must be an integer", line);
        double* probs[] = {&r.p_one, &r.p_two, &r.pop_one, &r.pop_two};
        for (std::size_t i = 0; i < 4; ++i) {
            *probs[i] = parse_csv_number(row[i + 1], line, header[i + 1]);
            if (!(*probs[i] >= 0.0 && *probs[i] <= 1.0)) {
                throw ParseError("probability outside [0,1] in column '" + header[i + 1] + "'", line);
            }
        }
        for (std::size_t i = base.size(); i < row.size(); ++i) {
            r.fields.push_back(parse_csv_number(row[i], line, header[i]));
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

}  // namespace popeq
