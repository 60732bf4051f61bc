#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autoflow/matrix.hpp"

namespace autoflow {

enum class ColumnKind : std::uint8_t { Numeric, Categorical };

struct ColumnSchema {
    std::string name;
    ColumnKind kind;

    bool operator==(const ColumnSchema&) const = default;
};

/// One column of a Table. Missing cells carry an explicit flag, never a
/// sentinel value, so Numeric and Categorical columns behave identically.
class Column {
public:
    static Column numeric(std::vector<double> values, std::vector<std::uint8_t> missing = {});
    static Column categorical(std::vector<std::string> values, std::vector<std::uint8_t> missing = {});

    ColumnKind kind() const { return kind_; }
    std::size_t size() const { return missing_.size(); }
    bool is_missing(std::size_t row) const { return missing_[row] != 0; }
    bool has_missing() const;

    double number(std::size_t row) const { return numbers_[row]; }
    const std::string& label(std::size_t row) const { return labels_[row]; }

    const std::vector<double>& numbers() const { return numbers_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::uint8_t>& missing() const { return missing_; }

    Column select(std::span<const std::size_t> rows) const;

private:
    ColumnKind kind_ = ColumnKind::Numeric;
    std::vector<double> numbers_;
    std::vector<std::string> labels_;
    std::vector<std::uint8_t> missing_;
};

/// Immutable column-typed table; the substrate every pipeline stage consumes
/// and produces. Schema order is stable, column names unique.
class Table {
public:
    Table() = default;
    Table(std::vector<ColumnSchema> schema, std::vector<Column> columns);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return schema_.size(); }
    const std::vector<ColumnSchema>& schema() const { return schema_; }

    const Column& column(std::size_t i) const { return columns_[i]; }
    std::optional<std::size_t> find_column(std::string_view name) const;

    Table select_rows(std::span<const std::size_t> rows) const;
    Table drop_column(std::size_t index) const;

    std::size_t count_kind(ColumnKind kind) const;
    bool has_missing() const;

private:
    std::vector<ColumnSchema> schema_;
    std::vector<Column> columns_;
    std::size_t n_rows_ = 0;
};

struct TargetSpec {
    std::string column;
    std::optional<std::string> positive_label;  // default: the greater label
};

/// RFC-4180-style CSV: quoted fields, embedded commas/quotes/newlines,
/// UTF-8 passthrough. A column is Numeric iff every non-empty field parses
/// fully as a decimal number (dot separator, scientific notation accepted);
/// empty fields become missing cells.
Table read_csv_text(std::string_view text, bool header = true);
Table read_csv(const std::string& path, bool header = true);

/// Numeric cells are written with shortest round-trip formatting, so
/// read -> write -> read is a fixed point.
std::string to_csv(const Table& t);
void write_csv(const Table& t, const std::string& path);

struct SplitXy {
    Table features;
    std::vector<int> labels;      // 1 = positive
    std::string positive_label;   // resolved display values
    std::string negative_label;
};

SplitXy split_xy(const Table& t, const TargetSpec& target);

/// Bridge to the estimator world: requires an all-numeric, fully observed
/// table (NeedsEncoding / MissingValues otherwise).
Matrix to_matrix(const Table& t);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double v);

}  // namespace autoflow
