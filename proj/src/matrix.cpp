#include "hrpca/matrix.hpp"

#include <cmath>
#include <unordered_set>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace {

void check_unique(const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(names.size());
    for (const auto& n : names) {
        if (!seen.insert(n).second) {
            throw InvalidInput(std::string("duplicate ") + what + ": " + n);
        }
    }
}

}  // namespace

void FeatureMatrix::validate() const {
    if (values.size() != n_rows * n_cols) {
        throw InvalidInput("matrix value count " + std::to_string(values.size()) +
                           " does not equal n_rows*n_cols = " +
                           std::to_string(n_rows * n_cols));
    }
    if (col_names.size() != n_cols) {
        throw InvalidInput("col_names size does not match n_cols");
    }
    if (row_ids.size() != n_rows) {
        throw InvalidInput("row_ids size does not match n_rows");
    }
    check_unique(col_names, "column name");
    check_unique(row_ids, "row id");
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidInput("matrix contains a non-finite value");
        }
    }
}

FeatureMatrix make_matrix(std::size_t n_rows, std::size_t n_cols,
                          std::vector<double> values,
                          std::vector<std::string> col_names,
                          std::vector<std::string> row_ids) {
    FeatureMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.values = std::move(values);
    m.col_names = col_names.empty() ? default_col_names(n_cols) : std::move(col_names);
    m.row_ids = row_ids.empty() ? default_row_ids("row", n_rows) : std::move(row_ids);
    m.validate();
    return m;
}

std::vector<std::string> default_col_names(std::size_t n_cols) {
    std::vector<std::string> names;
    names.reserve(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) {
        names.push_back("f" + std::to_string(j));
    }
    return names;
}

std::vector<std::string> default_row_ids(const std::string& prefix, std::size_t n_rows) {
    std::vector<std::string> ids;
    ids.reserve(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        ids.push_back(prefix + "_" + std::to_string(i));
    }
    return ids;
}

void relabel_rows(FeatureMatrix& m, const std::string& prefix) {
    m.row_ids = default_row_ids(prefix, m.n_rows);
}

}  // namespace hrpca
