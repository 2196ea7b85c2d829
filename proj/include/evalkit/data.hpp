#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace evalkit {

/// Raised for malformed input files. `line()` is 1-based (header is line 1), 0 if not applicable.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data size mismatch");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            auto src = row(idx[i]);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

    Matrix select_cols(std::span<const std::size_t> idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Features, dense class labels and optional group identifiers (the unit of
/// independence: rows sharing a group must never be split across train/test).
class Dataset {
public:
    Dataset(Matrix features, std::vector<int> labels, int class_count,
            std::optional<std::vector<std::string>> groups = std::nullopt)
        : features_(std::move(features)), labels_(std::move(labels)), groups_(std::move(groups)),
          class_count_(class_count) {
        if (features_.rows() == 0) throw std::invalid_argument("Dataset: no rows");
        if (features_.cols() == 0) throw std::invalid_argument("Dataset: no feature columns");
        if (labels_.size() != features_.rows())
            throw std::invalid_argument("Dataset: label count differs from feature rows");
        if (groups_ && groups_->size() != features_.rows())
            throw std::invalid_argument("Dataset: group count differs from feature rows");
        if (class_count_ < 2) throw std::invalid_argument("Dataset: class_count must be >= 2");
        for (int y : labels_)
            if (y < 0 || y >= class_count_) throw std::invalid_argument("Dataset: label out of range");
    }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t feature_count() const noexcept { return features_.cols(); }
    int class_count() const noexcept { return class_count_; }

    const Matrix& features() const noexcept { return features_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    bool has_groups() const noexcept { return groups_.has_value(); }
    const std::vector<std::string>& groups() const {
        if (!groups_) throw std::logic_error("Dataset has no groups");
        return *groups_;
    }

    /// Original label strings, index = encoded class.
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::string& label_column() const noexcept { return label_column_; }
    const std::string& group_column() const noexcept { return group_column_; }

    void set_metadata(std::vector<std::string> label_names, std::vector<std::string> feature_names,
                      std::string label_column, std::string group_column = {}) {
        label_names_ = std::move(label_names);
        feature_names_ = std::move(feature_names);
        label_column_ = std::move(label_column);
        group_column_ = std::move(group_column);
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(static_cast<std::size_t>(class_count_), 0);
        for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
        return counts;
    }

    Dataset subset(std::span<const std::size_t> idx) const {
        std::vector<int> labels;
        labels.reserve(idx.size());
        for (auto i : idx) labels.push_back(labels_.at(i));
        std::optional<std::vector<std::string>> groups;
        if (groups_) {
            groups.emplace();
            for (auto i : idx) groups->push_back((*groups_)[i]);
        }
        Dataset out(features_.select_rows(idx), std::move(labels), class_count_, std::move(groups));
        out.set_metadata(label_names_, feature_names_, label_column_, group_column_);
        return out;
    }

private:
    Matrix features_;
    std::vector<int> labels_;
    std::optional<std::vector<std::string>> groups_;
    int class_count_;
    std::vector<std::string> label_names_;
    std::vector<std::string> feature_names_;
    std::string label_column_;
    std::string group_column_;
};

/// Class probabilities; entries in [0,1] summing to 1 within 1e-12.
class PriorVector {
public:
    explicit PriorVector(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw std::invalid_argument("PriorVector: empty");
        double sum = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("PriorVector: entry outside [0,1]");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("PriorVector: entries do not sum to 1");
    }
    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& values() const noexcept { return p_; }

private:
    std::vector<double> p_;
};

/// Relative class frequencies n_j / n.
inline PriorVector estimate_priors(const Dataset& dataset) {
    const auto counts = dataset.class_counts();
    const double n = static_cast<double>(dataset.size());
    std::vector<double> p(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) p[j] = static_cast<double>(counts[j]) / n;
    // Renormalise so that rounding never violates the sum-to-one invariant.
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= sum;
    return PriorVector(std::move(p));
}

// ---------------------------------------------------------------------------
// CSV

namespace csv {

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

/// Header plus data rows; `line_numbers[i]` is the file line of row i.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

inline Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        for (auto& f : fields) f = std::string(trim(f));
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw DataError("expected " + std::to_string(t.header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            line_no);
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line_no);
    }
    if (!have_header) throw DataError("empty file: no header row");
    return t;
}

inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    return read_table(in);
}

}  // namespace csv

/// Column roles for ingestion. All columns other than the label and group
/// columns are numeric features.
struct Schema {
    std::string label_column = "label";
    std::optional<std::string> group_column;
};

/// Maps label strings to dense indices in order of first appearance.
class LabelEncoder {
public:
    int encode(const std::string& label) {
        auto [it, inserted] = index_.try_emplace(label, static_cast<int>(names_.size()));
        if (inserted) names_.push_back(label);
        return it->second;
    }
    std::optional<int> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

private:
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> names_;
};

inline Dataset dataset_from_table(const csv::Table& table, const Schema& schema) {
    const auto label_col = table.column(schema.label_column);
    if (!label_col) throw DataError("label column '" + schema.label_column + "' not found in header", 1);
    std::optional<std::size_t> group_col;
    if (schema.group_column) {
        group_col = table.column(*schema.group_column);
        if (!group_col) throw DataError("group column '" + *schema.group_column + "' not found in header", 1);
    }
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == *label_col || (group_col && c == *group_col)) continue;
        feature_cols.push_back(c);
        feature_names.push_back(table.header[c]);
    }
    if (feature_cols.empty()) throw DataError("no feature columns", 1);
    if (table.rows.empty()) throw DataError("no data rows");

    LabelEncoder encoder;
    Matrix x(table.rows.size(), feature_cols.size());
    std::vector<int> labels;
    labels.reserve(table.rows.size());
    std::optional<std::vector<std::string>> groups;
    if (group_col) groups.emplace();

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (row[*label_col].empty()) throw DataError("missing label", line);
        labels.push_back(encoder.encode(row[*label_col]));
        if (group_col) {
            if (row[*group_col].empty()) throw DataError("missing group identifier", line);
            groups->push_back(row[*group_col]);
        }
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            const auto& cell = row[feature_cols[j]];
            auto v = csv::parse_double(cell);
            if (!v)
                throw DataError(cell.empty() ? "missing value in column '" + feature_names[j] + "'"
                                             : "non-numeric value '" + cell + "' in column '" +
                                                   feature_names[j] + "'",
                                line);
            x(r, j) = *v;
        }
    }
    if (encoder.size() < 2) throw DataError("label column has fewer than 2 distinct labels");

    Dataset ds(std::move(x), std::move(labels), static_cast<int>(encoder.size()), std::move(groups));
    ds.set_metadata(encoder.names(), std::move(feature_names), schema.label_column,
                    schema.group_column.value_or(""));
    return ds;
}

inline Dataset load_dataset(const std::string& path, const Schema& schema) {
    return dataset_from_table(csv::read_table(path), schema);
}

/// Writes a dataset back out as CSV (label, optional group, features) using
/// the original label strings. Values are written with round-trip precision.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    const std::string label_col = ds.label_column().empty() ? "label" : ds.label_column();
    out << csv::quote(label_col);
    if (ds.has_groups()) out << ',' << csv::quote(ds.group_column().empty() ? "group" : ds.group_column());
    for (std::size_t j = 0; j < ds.feature_count(); ++j)
        out << ',' << csv::quote(j < ds.feature_names().size() ? ds.feature_names()[j] : "x" + std::to_string(j));
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto y = static_cast<std::size_t>(ds.labels()[i]);
        out << csv::quote(y < ds.label_names().size() ? ds.label_names()[y] : std::to_string(y));
        if (ds.has_groups()) out << ',' << csv::quote(ds.groups()[i]);
        for (double v : ds.features().row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

}  // namespace evalkit
