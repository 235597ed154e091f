#ifndef HRPCA_MODEL_HPP
#define HRPCA_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "hrpca/linalg.hpp"
#include "hrpca/matrix.hpp"

namespace hrpca {

// How a fitted model picks its rank and its anomaly threshold.
struct FitConfig {
    enum class RankMode { kFixed, kExplainedVariance };
    enum class ThresholdMode { kFixed, kDynamic };

    RankMode rank_mode = RankMode::kExplainedVariance;
    std::size_t fixed_rank = 1;
    double variance_cutoff = 0.95;

    ThresholdMode threshold_mode = ThresholdMode::kDynamic;
    double fixed_threshold = 0.0;
    double dynamic_k = 3.0;  // threshold = mean + k * std of training residuals

    double svd_tol = 1e-10;
    std::size_t svd_max_iters = 1000;

    void validate() const;  // throws InvalidConfig
};

// Per-level low-rank model: an orthonormal basis of principal directions
// over centered features, plus the residual statistics of its training set.
struct LevelModel {
    std::string level_name;
    std::vector<std::string> feature_names;  // size d, matches basis row order
    std::vector<double> col_means;           // size d
    std::vector<double> basis_u;             // d x r, row-major, orthonormal columns
    std::vector<double> singular_values;     // size r
    std::size_t rank = 0;
    double threshold = 0.0;
    double train_residual_mean = 0.0;
    double train_residual_std = 0.0;
    std::string version = "1.0.0";
    std::string content_hash;  // filled when the model is persisted

    std::size_t n_features() const { return feature_names.size(); }
    double u(std::size_t i, std::size_t k) const { return basis_u[i * rank + k]; }
};

// Split of an observation matrix X into the model's low-rank part L and the
// sparse residual S = X - L, with per-row residual norms.
struct Decomposition {
    FeatureMatrix low_rank;
    FeatureMatrix sparse;
    std::vector<double> scores;
};

// Fits a level model on clean training data: centers columns, takes the top
// principal directions, and derives the anomaly threshold from training
// residual norms (dynamic mode) or the configured constant (fixed mode).
// Throws InvalidConfig for an infeasible rank, DegenerateSpectrum when the
// centered data carries no variance.
LevelModel fit(const FeatureMatrix& x_train, const FitConfig& cfg,
               const std::string& level_name = "");

// L = ((X - mu) U) U^T + mu, S = X - L. Column names must match the model.
Decomposition decompose(const LevelModel& model, const FeatureMatrix& x);

// Row residual norms of decompose(model, x).sparse.
std::vector<double> score(const LevelModel& model, const FeatureMatrix& x);

// flag[i] = scores[i] > threshold (strict). Throws InvalidConfig for a
// negative or non-finite threshold.
std::vector<bool> flag(const std::vector<double>& scores, double threshold);

}  // namespace hrpca

#endif  // HRPCA_MODEL_HPP
