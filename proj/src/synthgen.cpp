#include "hrpca/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace {

// Distinct tags keep the three RNG streams disjoint even when their seeds
// coincide numerically.
constexpr std::uint64_t kStructureStream = 0x5741;
constexpr std::uint64_t kRowStream = 0x524f;
constexpr std::uint64_t kInjectStream = 0x494e;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{seed, stream};
    return std::mt19937_64(seq);
}

std::vector<double> draw_normals(std::mt19937_64& rng, std::size_t count,
                                 double stddev) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> out(count);
    for (double& v : out) v = dist(rng) * stddev;
    return out;
}

std::vector<double> column_stds(const FeatureMatrix& x) {
    std::vector<double> mean(x.n_cols, 0.0), var(x.n_cols, 0.0);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        for (std::size_t j = 0; j < x.n_cols; ++j) mean[j] += x.at(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        for (std::size_t j = 0; j < x.n_cols; ++j) {
            const double dlt = x.at(i, j) - mean[j];
            var[j] += dlt * dlt;
        }
    }
    std::vector<double> std_out(x.n_cols);
    for (std::size_t j = 0; j < x.n_cols; ++j) {
        std_out[j] = std::sqrt(var[j] / static_cast<double>(x.n_rows));
    }
    return std_out;
}

}  // namespace

void GenConfig::validate() const {
    if (n_base_rows < 1 || n_features < 1) {
        throw InvalidConfig("n_base_rows and n_features must be >= 1");
    }
    if (true_rank < 1 || true_rank > std::min(n_base_rows, n_features)) {
        throw InvalidConfig("true_rank must lie in [1, min(n_base_rows, n_features)]");
    }
    if (!std::isfinite(noise_floor_std) || noise_floor_std < 0.0) {
        throw InvalidConfig("noise_floor_std must be finite and >= 0");
    }
    if (!(anomaly_fraction >= 0.0) || anomaly_fraction >= 1.0) {
        throw InvalidConfig("anomaly_fraction must lie in [0, 1)");
    }
    if (!(anomaly_magnitude > 0.0) || !std::isfinite(anomaly_magnitude)) {
        throw InvalidConfig("anomaly_magnitude must be positive");
    }
    if (!(affected_feature_fraction > 0.0) || affected_feature_fraction > 1.0) {
        throw InvalidConfig("affected_feature_fraction must lie in (0, 1]");
    }
}

FeatureMatrix generate_clean(const GenConfig& cfg) {
    return generate_clean(cfg, cfg.seed);
}

FeatureMatrix generate_clean(const GenConfig& cfg, std::uint64_t row_seed) {
    cfg.validate();
    const std::size_t n = cfg.n_base_rows, d = cfg.n_features, r = cfg.true_rank;

    auto structure_rng = make_engine(cfg.seed, kStructureStream);
    const std::vector<double> w = draw_normals(structure_rng, r * d, 1.0);  // r x d

    auto row_rng = make_engine(row_seed, kRowStream);
    const std::vector<double> g = draw_normals(row_rng, n * r, 1.0);  // n x r

    std::vector<double> values(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            const double gik = g[i * r + k];
            for (std::size_t j = 0; j < d; ++j) {
                values[i * d + j] += gik * w[k * d + j];
            }
        }
    }
    if (cfg.noise_floor_std > 0.0) {
        const std::vector<double> e = draw_normals(row_rng, n * d, cfg.noise_floor_std);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += e[i];
    }
    return make_matrix(n, d, std::move(values));
}

Injection inject_anomalies(const FeatureMatrix& x, const GenConfig& cfg) {
    cfg.validate();
    const std::size_t n = x.n_rows, d = x.n_cols;
    const auto n_anom =
        static_cast<std::size_t>(std::llround(cfg.anomaly_fraction * static_cast<double>(n)));
    const auto n_aff = static_cast<std::size_t>(
        std::llround(cfg.affected_feature_fraction * static_cast<double>(d)));
    if (n > 0 && n_anom >= n) {
        throw InvalidConfig("anomaly_fraction rounds to every row; nothing clean remains");
    }

    Injection out;
    out.corrupted = x;
    out.labels.assign(n, false);
    if (n_anom == 0) {
        return out;
    }

    auto rng = make_engine(cfg.seed + 2, kInjectStream);

    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<std::size_t> chosen_rows;
    chosen_rows.reserve(n_anom);
    std::sample(rows.begin(), rows.end(), std::back_inserter(chosen_rows), n_anom, rng);

    std::vector<std::size_t> cols(d);
    std::iota(cols.begin(), cols.end(), 0);
    out.affected_features.reserve(n_aff);
    std::sample(cols.begin(), cols.end(), std::back_inserter(out.affected_features),
                n_aff, rng);

    const std::vector<double> sigma = column_stds(x);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (std::size_t row : chosen_rows) {
        out.labels[row] = true;
        for (std::size_t col : out.affected_features) {
            out.corrupted.at(row, col) += dist(rng) * cfg.anomaly_magnitude * sigma[col];
        }
    }
    return out;
}

Experiment generate_experiment(const GenConfig& cfg, const HierarchySpec& spec) {
    cfg.validate();
    spec.validate();

    FeatureMatrix train = generate_clean(cfg, cfg.seed);
    relabel_rows(train, spec.levels[0]);
    LevelDataset train_base{spec.levels[0], std::move(train), std::nullopt, std::nullopt};

    FeatureMatrix test_clean = generate_clean(cfg, cfg.seed + 1);
    relabel_rows(test_clean, spec.levels[0]);
    Injection injection = inject_anomalies(test_clean, cfg);
    LevelDataset test_base{spec.levels[0], std::move(injection.corrupted),
                           std::move(injection.labels), std::nullopt};

    Experiment exp;
    exp.train_chain = build_level_chain(train_base, spec);
    exp.test_chain = build_level_chain(test_base, spec);
    exp.injected_features = std::move(injection.affected_features);
    return exp;
}

}  // namespace hrpca
