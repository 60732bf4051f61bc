#include "autoflow/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "autoflow/error.hpp"

namespace autoflow {

Column Column::numeric(std::vector<double> values, std::vector<std::uint8_t> missing) {
    Column c;
    c.kind_ = ColumnKind::Numeric;
    if (missing.empty()) missing.assign(values.size(), 0);
    c.numbers_ = std::move(values);
    c.missing_ = std::move(missing);
    return c;
}

Column Column::categorical(std::vector<std::string> values, std::vector<std::uint8_t> missing) {
    Column c;
    c.kind_ = ColumnKind::Categorical;
    if (missing.empty()) missing.assign(values.size(), 0);
    c.labels_ = std::move(values);
    c.missing_ = std::move(missing);
    return c;
}

bool Column::has_missing() const {
    return std::find(missing_.begin(), missing_.end(), std::uint8_t{1}) != missing_.end();
}

Column Column::select(std::span<const std::size_t> rows) const {
    Column c;
    c.kind_ = kind_;
    c.missing_.reserve(rows.size());
    if (kind_ == ColumnKind::Numeric) {
        c.numbers_.reserve(rows.size());
        for (std::size_t r : rows) {
            c.numbers_.push_back(numbers_[r]);
            c.missing_.push_back(missing_[r]);
        }
    } else {
        c.labels_.reserve(rows.size());
        for (std::size_t r : rows) {
            c.labels_.push_back(labels_[r]);
            c.missing_.push_back(missing_[r]);
        }
    }
    return c;
}

Table::Table(std::vector<ColumnSchema> schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (schema_.size() != columns_.size())
        fail(ErrorCode::SchemaMismatch, "schema/column count mismatch");
    n_rows_ = columns_.empty() ? 0 : columns_[0].size();
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (columns_[i].size() != n_rows_)
            fail(ErrorCode::SchemaMismatch, "column '" + schema_[i].name + "' has inconsistent length");
        if (columns_[i].kind() != schema_[i].kind)
            fail(ErrorCode::SchemaMismatch, "column '" + schema_[i].name + "' kind disagrees with schema");
        if (!seen.insert(schema_[i].name).second)
            fail(ErrorCode::SchemaMismatch, "duplicate column name '" + schema_[i].name + "'");
    }
}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i)
        if (schema_[i].name == name) return i;
    return std::nullopt;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) cols.push_back(c.select(rows));
    return Table(schema_, std::move(cols));
}

Table Table::drop_column(std::size_t index) const {
    std::vector<ColumnSchema> schema = schema_;
    std::vector<Column> cols = columns_;
    schema.erase(schema.begin() + static_cast<std::ptrdiff_t>(index));
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(index));
    return Table(std::move(schema), std::move(cols));
}

std::size_t Table::count_kind(ColumnKind kind) const {
    std::size_t n = 0;
    for (const auto& s : schema_)
        if (s.kind == kind) ++n;
    return n;
}

bool Table::has_missing() const {
    for (const auto& c : columns_)
        if (c.has_missing()) return true;
    return false;
}

namespace {

// One CSV record; handles quoted fields with embedded separators, escaped
// quotes ("") and embedded line breaks. Returns false at end of input.
bool next_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields) {
    fields.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos < text.size()) {
        const char ch = text[pos];
        if (in_quotes) {
            if (ch == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                field.push_back(ch);
                ++pos;
            }
            continue;
        }
        if (ch == '"' && field.empty()) {
            in_quotes = true;
            any = true;
            ++pos;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            any = true;
            ++pos;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
            ++pos;
            any = true;
        }
    }
    (void)any;
    fields.push_back(std::move(field));
    return true;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

Table read_csv_text(std::string_view text, bool header) {
    std::size_t pos = 0;
    std::vector<std::string> fields;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> raw;  // column-major
    std::size_t n_cols = 0;
    std::size_t record_index = 0;

    while (next_record(text, pos, fields)) {
        // a lone empty trailing record comes from the final newline
        if (fields.size() == 1 && fields[0].empty() && pos >= text.size()) break;
        if (record_index == 0) {
            n_cols = fields.size();
            raw.resize(n_cols);
            if (header) {
                names = fields;
                ++record_index;
                continue;
            }
            names.reserve(n_cols);
            for (std::size_t i = 0; i < n_cols; ++i) names.push_back("c" + std::to_string(i));
        }
        if (fields.size() != n_cols)
            fail(ErrorCode::ParseError,
                 "row " + std::to_string(record_index) + " has " + std::to_string(fields.size()) +
                     " fields, expected " + std::to_string(n_cols));
        for (std::size_t i = 0; i < n_cols; ++i) raw[i].push_back(std::move(fields[i]));
        ++record_index;
    }

    if (n_cols == 0) fail(ErrorCode::EmptyInput, "CSV input is empty");
    const std::size_t n_rows = raw[0].size();

    std::vector<ColumnSchema> schema;
    std::vector<Column> columns;
    for (std::size_t i = 0; i < n_cols; ++i) {
        bool numeric = true;
        double tmp;
        for (const auto& cell : raw[i]) {
            if (cell.empty()) continue;
            if (!parse_number(cell, tmp)) {
                numeric = false;
                break;
            }
        }
        std::vector<std::uint8_t> missing(n_rows, 0);
        if (numeric) {
            std::vector<double> values(n_rows, 0.0);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (raw[i][r].empty()) {
                    missing[r] = 1;
                } else {
                    parse_number(raw[i][r], values[r]);
                }
            }
            schema.push_back({names[i], ColumnKind::Numeric});
            columns.push_back(Column::numeric(std::move(values), std::move(missing)));
        } else {
            for (std::size_t r = 0; r < n_rows; ++r)
                if (raw[i][r].empty()) missing[r] = 1;
            schema.push_back({names[i], ColumnKind::Categorical});
            columns.push_back(Column::categorical(std::move(raw[i]), std::move(missing)));
        }
    }
    return Table(std::move(schema), std::move(columns));
}

Table read_csv(const std::string& path, bool header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_csv_text(ss.str(), header);
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.n_cols(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(t.schema()[i].name);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t i = 0; i < t.n_cols(); ++i) {
            if (i) out.push_back(',');
            const Column& c = t.column(i);
            if (c.is_missing(r)) continue;  // missing = empty field
            if (c.kind() == ColumnKind::Numeric)
                out += format_number(c.number(r));
            else
                out += csv_escape(c.label(r));
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << to_csv(t);
}

namespace {

std::string label_at(const Column& c, std::size_t row) {
    return c.kind() == ColumnKind::Numeric ? format_number(c.number(row)) : c.label(row);
}

// numeric labels compare numerically, categorical lexicographically
bool label_greater(const Column& c, std::size_t a, std::size_t b) {
    if (c.kind() == ColumnKind::Numeric) return c.number(a) > c.number(b);
    return c.label(a) > c.label(b);
}

}  // namespace

SplitXy split_xy(const Table& t, const TargetSpec& target) {
    const auto idx = t.find_column(target.column);
    if (!idx) fail(ErrorCode::MissingTarget, "target column '" + target.column + "' not found");
    const Column& y = t.column(*idx);

    std::optional<std::size_t> first, second;  // representative rows of the two labels
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        if (y.is_missing(r))
            fail(ErrorCode::MissingTarget, "target has a missing label at row " + std::to_string(r));
        if (!first) {
            first = r;
        } else if (label_at(y, *first) != label_at(y, r)) {
            if (!second) {
                second = r;
            } else if (label_at(y, *second) != label_at(y, r)) {
                fail(ErrorCode::NotBinary, "target column has more than 2 distinct values");
            }
        }
    }
    if (!first) fail(ErrorCode::EmptyInput, "table has no rows");

    std::string positive;
    std::string negative;
    if (target.positive_label) {
        positive = *target.positive_label;
        if (second) {
            const std::string a = label_at(y, *first), b = label_at(y, *second);
            if (positive != a && positive != b)
                fail(ErrorCode::MissingTarget, "positive label '" + positive + "' not present in target");
            negative = (positive == a) ? b : a;
        } else {
            const std::string a = label_at(y, *first);
            negative = (positive == a) ? "" : a;
            if (positive != a && negative != a)
                fail(ErrorCode::MissingTarget, "positive label '" + positive + "' not present in target");
        }
    } else {
        if (!second)
            fail(ErrorCode::NotBinary, "target has a single distinct value and no positive label was given");
        // default: the numerically/lexicographically greater label is positive
        const bool first_greater = label_greater(y, *first, *second);
        positive = label_at(y, first_greater ? *first : *second);
        negative = label_at(y, first_greater ? *second : *first);
    }

    SplitXy out;
    out.positive_label = positive;
    out.negative_label = negative;
    out.labels.reserve(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        out.labels.push_back(label_at(y, r) == positive ? 1 : 0);
    out.features = t.drop_column(*idx);
    return out;
}

Matrix to_matrix(const Table& t) {
    for (std::size_t i = 0; i < t.n_cols(); ++i) {
        if (t.schema()[i].kind != ColumnKind::Numeric)
            fail(ErrorCode::NeedsEncoding,
                 "column '" + t.schema()[i].name + "' is categorical; encode it before this stage");
        if (t.column(i).has_missing())
            fail(ErrorCode::MissingValues,
                 "column '" + t.schema()[i].name + "' has missing values; impute before this stage");
    }
    Matrix m(t.n_rows(), t.n_cols());
    for (std::size_t i = 0; i < t.n_cols(); ++i) {
        const auto& vals = t.column(i).numbers();
        for (std::size_t r = 0; r < t.n_rows(); ++r) m.at(r, i) = vals[r];
    }
    return m;
}

}  // namespace autoflow
