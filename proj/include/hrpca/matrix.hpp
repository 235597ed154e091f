#ifndef HRPCA_MATRIX_HPP
#define HRPCA_MATRIX_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hrpca {

// Dense row-major matrix of named numeric features. Rows are entities
// (interactions, sessions, profiles, accounts), columns are features.
struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;          // row-major, n_rows * n_cols
    std::vector<std::string> col_names;  // size n_cols, unique
    std::vector<std::string> row_ids;    // size n_rows, unique

    double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_cols, n_cols};
    }

    // Throws InvalidInput if sizes disagree, ids/names repeat, or any value
    // is non-finite.
    void validate() const;
};

FeatureMatrix make_matrix(std::size_t n_rows, std::size_t n_cols,
                          std::vector<double> values,
                          std::vector<std::string> col_names = {},
                          std::vector<std::string> row_ids = {});

std::vector<std::string> default_col_names(std::size_t n_cols);
std::vector<std::string> default_row_ids(const std::string& prefix, std::size_t n_rows);

// Replaces row ids with "<prefix>_<index>".
void relabel_rows(FeatureMatrix& m, const std::string& prefix);

}  // namespace hrpca

#endif  // HRPCA_MATRIX_HPP
