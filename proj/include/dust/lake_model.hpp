#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dust/common.hpp"

namespace dust::lake {

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

enum class Role { query, lake };

/// Identifies one column lake-wide: (table, index) is the key, the header is
/// informational only.
struct ColumnRef {
    std::string table;
    std::size_t index = 0;
    std::optional<std::string> header;

    friend bool operator==(const ColumnRef& a, const ColumnRef& b) {
        return a.table == b.table && a.index == b.index;
    }
    friend std::strong_ordering operator<=>(const ColumnRef& a, const ColumnRef& b) {
        if (auto c = a.table <=> b.table; c != 0) return c;
        return a.index <=> b.index;
    }
};

struct TupleRef {
    std::string table;
    std::size_t row = 0;

    friend bool operator==(const TupleRef&, const TupleRef&) = default;
    friend std::strong_ordering operator<=>(const TupleRef& a, const TupleRef& b) {
        if (auto c = a.table <=> b.table; c != 0) return c;
        return a.row <=> b.row;
    }
};

inline std::ostream& operator<<(std::ostream& os, const TupleRef& t) {
    return os << t.table << '#' << t.row;
}

inline std::ostream& operator<<(std::ostream& os, const ColumnRef& c) {
    return os << c.table << '.' << c.index;
}

class RaggedRowError : public Error {
public:
    using Error::Error;
};

class DuplicateHeaderError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A relational table of nullable text cells. Headers are stored trimmed with
/// their original case; uniqueness is checked on the case-folded form.
struct Table {
    std::string name;
    Role role = Role::lake;
    std::vector<std::string> headers;
    std::vector<Row> rows;

    std::size_t num_columns() const { return headers.size(); }
    std::size_t num_rows() const { return rows.size(); }

    const Cell& at(std::size_t row, std::size_t col) const { return rows.at(row).at(col); }

    ColumnRef column(std::size_t index) const { return ColumnRef{name, index, headers.at(index)}; }

    std::vector<ColumnRef> columns() const {
        std::vector<ColumnRef> out;
        out.reserve(headers.size());
        for (std::size_t i = 0; i < headers.size(); ++i) out.push_back(column(i));
        return out;
    }

    std::vector<Cell> column_values(std::size_t index) const {
        std::vector<Cell> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(index));
        return out;
    }
};

inline bool is_null_spelling(std::string_view raw) {
    auto v = text::trim(raw);
    return v.empty() || v == "nan" || v == "NaN" || v == "null" || v == "NULL";
}

inline Cell make_cell(std::string raw) {
    if (is_null_spelling(raw)) return std::nullopt;
    return Cell{std::move(raw)};
}

/// Trims headers, names missing ones "col<index>" and rejects duplicates
/// under case-folding.
inline std::vector<std::string> normalize_headers(const std::vector<std::string>& raw,
                                                  std::string_view table_name) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto h = text::trim(raw[i]);
        if (h.empty()) h = "col" + std::to_string(i);
        if (!seen.insert(text::casefold(h)).second) {
            throw DuplicateHeaderError("table '" + std::string(table_name) +
                                       "': duplicate header '" + h + "'");
        }
        out.push_back(std::move(h));
    }
    return out;
}

namespace detail {

// RFC-4180 record reader. Returns false at end of input.
inline bool read_record(std::istream& in, char delim, std::vector<std::string>& fields,
                        std::size_t& line_no) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c = 0;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else if (c == '\n') {
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) throw IoError("unterminated quoted field near line " + std::to_string(line_no + 1));
    fields.push_back(std::move(field));
    return true;
}

inline std::string quote_field(std::string_view v, char delim) {
    bool needs = v.find_first_of(std::string{'"', '\n', '\r', delim}) != std::string_view::npos ||
                 (!v.empty() && (v.front() == ' ' || v.back() == ' '));
    if (!needs) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

/// Parses a delimited table with a mandatory header row.
inline Table parse_table(std::istream& in, std::string name, Role role, char delim = ',') {
    Table t;
    t.name = std::move(name);
    t.role = role;
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    if (!detail::read_record(in, delim, fields, line_no)) {
        throw IoError("table '" + t.name + "': missing header row");
    }
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
    t.headers = normalize_headers(fields, t.name);
    while (true) {
        std::size_t record_line = line_no + 1;
        if (!detail::read_record(in, delim, fields, line_no)) break;
        if (fields.size() == 1 && fields[0].empty() && t.headers.size() != 1) continue;  // blank line
        if (fields.size() != t.headers.size()) {
            throw RaggedRowError("table '" + t.name + "': row at line " + std::to_string(record_line) +
                                 " has " + std::to_string(fields.size()) + " cells, expected " +
                                 std::to_string(t.headers.size()));
        }
        Row row;
        row.reserve(fields.size());
        for (auto& f : fields) row.push_back(make_cell(std::move(f)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Loads a CSV file; the table is named after the file stem.
inline Table load_table(const std::filesystem::path& path, Role role, char delim = ',') {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open table file: " + path.string());
    return parse_table(in, path.stem().string(), role, delim);
}

/// Writes a table as RFC-4180 CSV; null cells are written as empty fields.
inline void write_table(std::ostream& out, const Table& t, char delim = ',') {
    for (std::size_t j = 0; j < t.headers.size(); ++j) {
        if (j) out << delim;
        out << detail::quote_field(t.headers[j], delim);
    }
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out << delim;
            if (r[j]) out << detail::quote_field(*r[j], delim);
        }
        out << '\n';
    }
}

inline void save_table(const std::filesystem::path& path, const Table& t, char delim = ',') {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write table file: " + path.string());
    write_table(out, t, delim);
}

inline Table drop_null_columns(const Table& t) {
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < t.num_columns(); ++j) {
        for (const auto& r : t.rows) {
            if (r[j]) {
                keep.push_back(j);
                break;
            }
        }
    }
    Table out;
    out.name = t.name;
    out.role = t.role;
    for (auto j : keep) out.headers.push_back(t.headers[j]);
    out.rows.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        Row nr;
        nr.reserve(keep.size());
        for (auto j : keep) nr.push_back(r[j]);
        out.rows.push_back(std::move(nr));
    }
    return out;
}

struct QueryRejection {
    std::size_t row_count = 0;
    std::string reason;
};

inline constexpr std::size_t kMinQueryRows = 3;

/// Empty optional means the query is accepted.
inline std::optional<QueryRejection> validate_query(const Table& t) {
    if (t.num_rows() >= kMinQueryRows) return std::nullopt;
    return QueryRejection{t.num_rows(), "query table '" + t.name + "' has " +
                                            std::to_string(t.num_rows()) + " rows; at least " +
                                            std::to_string(kMinQueryRows) + " required"};
}

}  // namespace dust::lake
