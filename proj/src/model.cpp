#include "hrpca/model.hpp"

#include <cmath>

#include "hrpca/errors.hpp"

namespace hrpca {

void FitConfig::validate() const {
    if (rank_mode == RankMode::kFixed && fixed_rank < 1) {
        throw InvalidConfig("fixed rank must be >= 1");
    }
    if (rank_mode == RankMode::kExplainedVariance &&
        (!(variance_cutoff > 0.0) || variance_cutoff > 1.0)) {
        throw InvalidConfig("variance cutoff must lie in (0, 1]");
    }
    if (threshold_mode == ThresholdMode::kFixed &&
        (!std::isfinite(fixed_threshold) || fixed_threshold < 0.0)) {
        throw InvalidConfig("fixed threshold must be finite and >= 0");
    }
    if (threshold_mode == ThresholdMode::kDynamic &&
        (!std::isfinite(dynamic_k) || !(dynamic_k > 0.0))) {
        throw InvalidConfig("dynamic threshold multiplier must be > 0");
    }
    if (!(svd_tol > 0.0) || svd_max_iters < 1) {
        throw InvalidConfig("svd_tol must be > 0 and svd_max_iters >= 1");
    }
}

namespace {

void check_schema(const LevelModel& model, const FeatureMatrix& x) {
    if (x.n_cols != model.n_features()) {
        throw SchemaMismatch("expected " + std::to_string(model.n_features()) +
                             " columns, got " + std::to_string(x.n_cols));
    }
    for (std::size_t j = 0; j < x.n_cols; ++j) {
        if (x.col_names[j] != model.feature_names[j]) {
            throw SchemaMismatch("column " + std::to_string(j) + " is '" +
                                 x.col_names[j] + "', model expects '" +
                                 model.feature_names[j] + "'");
        }
    }
}

}  // namespace

LevelModel fit(const FeatureMatrix& x_train, const FitConfig& cfg,
               const std::string& level_name) {
    cfg.validate();
    if (x_train.n_rows < 2) {
        throw InvalidInput("training requires at least 2 rows");
    }
    const std::size_t n = x_train.n_rows, d = x_train.n_cols;
    if (cfg.rank_mode == FitConfig::RankMode::kFixed &&
        (cfg.fixed_rank > d || cfg.fixed_rank >= n)) {
        throw InvalidConfig("fixed rank " + std::to_string(cfg.fixed_rank) +
                            " infeasible for " + std::to_string(n) + "x" +
                            std::to_string(d) + " training data");
    }

    auto [centered, means] = center_columns(x_train);
    SvdResult svd = truncated_svd(centered, std::min(n, d), cfg.svd_tol,
                                  cfg.svd_max_iters);
    if (svd.rank == 0) {
        throw DegenerateSpectrum("training data has no variance after centering");
    }

    std::size_t r;
    if (cfg.rank_mode == FitConfig::RankMode::kFixed) {
        // A request beyond the numerical rank degrades to the rank the data
        // actually supports.
        r = std::min(cfg.fixed_rank, svd.rank);
    } else {
        r = rank_by_explained_variance(svd.singular_values, cfg.variance_cutoff);
    }

    LevelModel model;
    model.level_name = level_name;
    model.feature_names = x_train.col_names;
    model.col_means = std::move(means);
    model.rank = r;
    model.singular_values.assign(svd.singular_values.begin(),
                                 svd.singular_values.begin() + r);
    model.basis_u.resize(d * r);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            model.basis_u[i * r + k] = svd.u(i, k);
        }
    }

    const std::vector<double> residuals = score(model, x_train);
    double mean = 0.0;
    for (double s : residuals) mean += s;
    mean /= static_cast<double>(residuals.size());
    double var = 0.0;
    for (double s : residuals) var += (s - mean) * (s - mean);
    var /= static_cast<double>(residuals.size());  // population variance
    model.train_residual_mean = mean;
    model.train_residual_std = std::sqrt(var);

    model.threshold = cfg.threshold_mode == FitConfig::ThresholdMode::kFixed
                          ? cfg.fixed_threshold
                          : mean + cfg.dynamic_k * model.train_residual_std;
    return model;
}

Decomposition decompose(const LevelModel& model, const FeatureMatrix& x) {
    check_schema(model, x);
    const std::size_t n = x.n_rows, d = x.n_cols, r = model.rank;

    Decomposition out;
    out.low_rank = x;
    out.sparse = x;
    out.scores.resize(n);

    std::vector<double> proj(r);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            double p = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                p += (x.at(i, j) - model.col_means[j]) * model.u(j, k);
            }
            proj[k] = p;
        }
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double recon = model.col_means[j];
            for (std::size_t k = 0; k < r; ++k) {
                recon += proj[k] * model.u(j, k);
            }
            out.low_rank.at(i, j) = recon;
            const double s = x.at(i, j) - recon;
            out.sparse.at(i, j) = s;
            norm_sq += s * s;
        }
        out.scores[i] = std::sqrt(norm_sq);
    }
    return out;
}

std::vector<double> score(const LevelModel& model, const FeatureMatrix& x) {
    return decompose(model, x).scores;
}

std::vector<bool> flag(const std::vector<double>& scores, double threshold) {
    if (!std::isfinite(threshold) || threshold < 0.0) {
        throw InvalidConfig("threshold must be finite and >= 0");
    }
    std::vector<bool> flags(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        flags[i] = scores[i] > threshold;
    }
    return flags;
}

}  // namespace hrpca
