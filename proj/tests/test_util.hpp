#ifndef HRPCA_TESTS_TEST_UTIL_HPP
#define HRPCA_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hrpca/matrix.hpp"

namespace hrpca::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline FeatureMatrix random_matrix(std::mt19937_64& gen, std::size_t n, std::size_t d) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> values(n * d);
    for (double& v : values) v = dist(gen);
    return make_matrix(n, d, std::move(values));
}

// Exact low-rank product of two Gaussian factors.
inline FeatureMatrix random_low_rank(std::mt19937_64& gen, std::size_t n, std::size_t d,
                                     std::size_t rank) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> g(n * rank), w(rank * d);
    for (double& v : g) v = dist(gen);
    for (double& v : w) v = dist(gen);
    std::vector<double> values(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < rank; ++k) {
            for (std::size_t j = 0; j < d; ++j) {
                values[i * d + j] += g[i * rank + k] * w[k * d + j];
            }
        }
    }
    return make_matrix(n, d, std::move(values));
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double frobenius_norm(const FeatureMatrix& m) {
    double s = 0.0;
    for (double v : m.values) s += v * v;
    return std::sqrt(s);
}

}  // namespace hrpca::testing

#endif  // HRPCA_TESTS_TEST_UTIL_HPP
