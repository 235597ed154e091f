#ifndef HRPCA_LINALG_HPP
#define HRPCA_LINALG_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "hrpca/matrix.hpp"

namespace hrpca {

// Top factors of a truncated singular value decomposition of a data matrix.
// basis_u holds the right singular vectors of the data (the principal
// directions): a d x r column set stored row-major, orthonormal within 1e-8.
// Sign convention: in each column the entry of largest absolute value is
// positive (ties broken by lowest row index), so repeated runs and stored
// models agree bit for bit.
struct SvdResult {
    std::size_t n_cols = 0;               // d, rows of basis_u
    std::size_t rank = 0;                 // r, columns of basis_u
    std::vector<double> basis_u;          // d x r, row-major
    std::vector<double> singular_values;  // r values, non-increasing, >= 0

    double u(std::size_t i, std::size_t k) const { return basis_u[i * rank + k]; }
};

// Subtracts the per-column arithmetic mean from every column. Returns the
// centered matrix and the mean vector. Throws InvalidInput on an empty
// matrix.
std::pair<FeatureMatrix, std::vector<double>> center_columns(const FeatureMatrix& x);

// Deterministic truncated SVD via cyclic one-sided Jacobi rotations.
//
// Returns the top r = min(max_rank, numerical rank) factors, where singular
// values below 1e-10 * sigma_max count as numerical zeros. The sweep order
// is fixed, so identical inputs give bit-identical outputs on one platform.
// tol bounds the residual column cosine |a_p . a_q| / (|a_p||a_q|) at
// convergence; max_iters caps the number of full sweeps.
//
// Throws InvalidInput for non-finite entries or an out-of-range max_rank,
// and NumericalFailure (carrying the sweep count) if the sweeps do not
// converge.
SvdResult truncated_svd(const FeatureMatrix& x, std::size_t max_rank,
                        double tol = 1e-10, std::size_t max_iters = 1000);

// Smallest r such that the top-r squared singular values reach `cutoff`
// of total squared energy. cutoff must lie in (0, 1]. Throws
// DegenerateSpectrum when the spectrum is all zero.
std::size_t rank_by_explained_variance(const std::vector<double>& singular_values,
                                       double cutoff);

// Euclidean norm of each row.
std::vector<double> row_l2_norms(const FeatureMatrix& x);

}  // namespace hrpca

#endif  // HRPCA_LINALG_HPP
