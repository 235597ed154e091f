#include "hrpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace {

constexpr double kRankCutoff = 1e-10;  // sigma_j < cutoff * sigma_1 counts as zero

void check_finite(const FeatureMatrix& x) {
    for (double v : x.values) {
        if (!std::isfinite(v)) {
            throw InvalidInput("matrix contains a non-finite value");
        }
    }
}

// Column-major working copy so Jacobi column sweeps touch contiguous memory.
struct ColMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;  // column-major

    ColMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* col(std::size_t j) { return data.data() + j * rows; }
    const double* col(std::size_t j) const { return data.data() + j * rows; }
};

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// One-sided Jacobi: repeatedly rotate column pairs of `a` until all pairs
// are orthogonal within tol, accumulating the same rotations into `acc`
// (initialized to identity). On return the columns of `a` are U * diag(s)
// of a = U diag(s) V^T and `acc` holds V. Returns the sweep count.
//
// Columns whose norm has fallen below 1e-14 of the largest initial column
// norm are frozen: the largest column norm never decreases under these
// rotations, so frozen columns sit far below the rank cutoff and cannot
// re-enter the returned factors, while rotating against them only churns
// rounding noise.
std::size_t jacobi_orthogonalize(ColMat& a, ColMat& acc, double tol,
                                 std::size_t max_iters) {
    const std::size_t m = a.rows, k = a.cols;
    double max_norm_sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        max_norm_sq = std::max(max_norm_sq, dot(a.col(j), a.col(j), m));
    }
    const double freeze_sq = 1e-28 * max_norm_sq;

    for (std::size_t sweep = 1; sweep <= max_iters; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                double* ap = a.col(p);
                double* aq = a.col(q);
                const double app = dot(ap, ap, m);
                const double aqq = dot(aq, aq, m);
                const double apq = dot(ap, aq, m);
                // sqrt per factor: the product app * aqq can overflow.
                const double scale = std::sqrt(app) * std::sqrt(aqq);
                if (scale == 0.0 || app <= freeze_sq || aqq <= freeze_sq ||
                    std::abs(apq) <= tol * scale) {
                    continue;
                }
                // Rotation angle that zeroes the (p,q) inner product; for
                // huge |zeta| use t ~ 1/(2 zeta) so zeta^2 cannot overflow
                // into a spurious zero-angle rotation.
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t =
                    std::abs(zeta) > 1e150
                        ? 1.0 / (2.0 * zeta)
                        : (zeta >= 0.0 ? 1.0 : -1.0) /
                              (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double tmp = ap[i];
                    ap[i] = c * tmp - s * aq[i];
                    aq[i] = s * tmp + c * aq[i];
                }
                double* vp = acc.col(p);
                double* vq = acc.col(q);
                for (std::size_t i = 0; i < acc.rows; ++i) {
                    const double tmp = vp[i];
                    vp[i] = c * tmp - s * vq[i];
                    vq[i] = s * tmp + c * vq[i];
                }
                rotated = true;
            }
        }
        if (!rotated) {
            return sweep;
        }
    }
    throw NumericalFailure("one-sided Jacobi SVD did not converge", max_iters);
}

void apply_sign_convention(std::vector<double>& basis, std::size_t d, std::size_t r) {
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double v = std::abs(basis[i * r + k]);
            if (v > best) {  // strict: ties keep the lowest index
                best = v;
                arg = i;
            }
        }
        if (basis[arg * r + k] < 0.0) {
            for (std::size_t i = 0; i < d; ++i) basis[i * r + k] = -basis[i * r + k];
        }
    }
}

}  // namespace

std::pair<FeatureMatrix, std::vector<double>> center_columns(const FeatureMatrix& x) {
    if (x.n_rows == 0 || x.n_cols == 0) {
        throw InvalidInput("cannot center an empty matrix");
    }
    check_finite(x);
    std::vector<double> means(x.n_cols, 0.0);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        for (std::size_t j = 0; j < x.n_cols; ++j) {
            means[j] += x.at(i, j);
        }
    }
    for (double& m : means) m /= static_cast<double>(x.n_rows);

    FeatureMatrix centered = x;
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        for (std::size_t j = 0; j < x.n_cols; ++j) {
            centered.at(i, j) -= means[j];
        }
    }
    return {std::move(centered), std::move(means)};
}

SvdResult truncated_svd(const FeatureMatrix& x, std::size_t max_rank, double tol,
                        std::size_t max_iters) {
    const std::size_t n = x.n_rows, d = x.n_cols;
    if (n == 0 || d == 0) {
        throw InvalidInput("cannot decompose an empty matrix");
    }
    check_finite(x);
    if (max_rank < 1 || max_rank > std::min(n, d)) {
        throw InvalidInput("max_rank " + std::to_string(max_rank) +
                           " outside [1, min(n_rows, n_cols)]");
    }
    if (!(tol > 0.0)) {
        throw InvalidInput("tol must be positive");
    }

    // Work on the tall orientation so the rotated matrix has the fewer
    // columns. tall = x when n >= d, x^T otherwise.
    const bool transposed = n < d;
    const std::size_t m = transposed ? d : n;  // rows of the working matrix
    const std::size_t k = transposed ? n : d;  // columns of the working matrix

    ColMat work(m, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (transposed) {
                work.col(i)[j] = x.at(i, j);
            } else {
                work.col(j)[i] = x.at(i, j);
            }
        }
    }
    ColMat acc(k, k);
    for (std::size_t j = 0; j < k; ++j) acc.col(j)[j] = 1.0;

    jacobi_orthogonalize(work, acc, tol, max_iters);

    std::vector<double> norms(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        norms[j] = std::sqrt(dot(work.col(j), work.col(j), m));
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    const double sigma_max = norms[order[0]];
    std::size_t numerical_rank = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (norms[order[j]] >= kRankCutoff * sigma_max && norms[order[j]] > 0.0) {
            ++numerical_rank;
        }
    }
    const std::size_t r = std::min(max_rank, numerical_rank);

    SvdResult result;
    result.n_cols = d;
    result.rank = r;
    result.singular_values.resize(r);
    result.basis_u.assign(d * r, 0.0);
    for (std::size_t c = 0; c < r; ++c) {
        const std::size_t src = order[c];
        result.singular_values[c] = norms[src];
        if (transposed) {
            // Right singular vectors of x are the normalized rotated columns.
            const double inv = 1.0 / norms[src];
            for (std::size_t i = 0; i < d; ++i) {
                result.basis_u[i * r + c] = work.col(src)[i] * inv;
            }
        } else {
            // Right singular vectors of x are the accumulated rotations.
            for (std::size_t i = 0; i < d; ++i) {
                result.basis_u[i * r + c] = acc.col(src)[i];
            }
        }
    }
    apply_sign_convention(result.basis_u, d, r);
    return result;
}

std::size_t rank_by_explained_variance(const std::vector<double>& singular_values,
                                       double cutoff) {
    if (singular_values.empty()) {
        throw InvalidInput("empty spectrum");
    }
    if (!(cutoff > 0.0) || cutoff > 1.0) {
        throw InvalidInput("explained-variance cutoff must lie in (0, 1]");
    }
    for (std::size_t j = 0; j < singular_values.size(); ++j) {
        const double v = singular_values[j];
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidInput("spectrum values must be finite and non-negative");
        }
        if (j > 0 && v > singular_values[j - 1]) {
            throw InvalidInput("spectrum must be sorted in non-increasing order");
        }
    }

    std::vector<double> cumulative(singular_values.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < singular_values.size(); ++j) {
        acc += singular_values[j] * singular_values[j];
        cumulative[j] = acc;
    }
    const double total = cumulative.back();
    if (total == 0.0) {
        throw DegenerateSpectrum("all singular values are zero");
    }
    for (std::size_t j = 0; j < cumulative.size(); ++j) {
        if (cumulative[j] >= cutoff * total) {
            return j + 1;
        }
    }
    return singular_values.size();
}

std::vector<double> row_l2_norms(const FeatureMatrix& x) {
    check_finite(x);
    std::vector<double> norms(x.n_rows, 0.0);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.n_cols; ++j) {
            const double v = x.at(i, j);
            s += v * v;
        }
        norms[i] = std::sqrt(s);
    }
    return norms;
}

}  // namespace hrpca
