#ifndef HRPCA_SYNTHGEN_HPP
#define HRPCA_SYNTHGEN_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hrpca/hierarchy.hpp"
#include "hrpca/matrix.hpp"

namespace hrpca {

// Parameters of the synthetic multi-level experiment. Clean data is a
// random low-rank product plus a small Gaussian floor; anomalies are
// additive Gaussian spikes on a random subset of rows.
struct GenConfig {
    std::size_t n_base_rows = 625;
    std::size_t n_features = 10;
    std::size_t true_rank = 1;
    double noise_floor_std = 0.01;
    double anomaly_fraction = 0.1;          // in [0, 1)
    double anomaly_magnitude = 5.0;         // multiple of the clean column std
    double affected_feature_fraction = 1.0; // in (0, 1]
    std::uint64_t seed = 42;

    void validate() const;  // throws InvalidConfig
};

// Clean low-rank data X = G W + E: G is n x r and W is r x d with standard
// normal entries, E has entries N(0, noise_floor_std^2).
//
// The latent projection W is drawn from a stream keyed by cfg.seed alone;
// coefficients G and noise E come from a stream keyed by row_seed. Calls
// sharing cfg.seed therefore sample new rows of the same low-rank
// population. The one-argument form uses row_seed = cfg.seed.
FeatureMatrix generate_clean(const GenConfig& cfg);
FeatureMatrix generate_clean(const GenConfig& cfg, std::uint64_t row_seed);

struct Injection {
    FeatureMatrix corrupted;
    std::vector<bool> labels;                   // true exactly on corrupted rows
    std::vector<std::size_t> affected_features; // sorted column indices
};

// Picks round(anomaly_fraction * n_rows) rows without replacement and one
// subset of round(affected_feature_fraction * d) features, then adds
// N(0, (anomaly_magnitude * clean column std)^2) noise to those cells.
// Draws come from a stream keyed by cfg.seed + 2. Throws InvalidConfig if
// the rounded row count would corrupt every row.
Injection inject_anomalies(const FeatureMatrix& x, const GenConfig& cfg);

struct Experiment {
    std::vector<LevelDataset> train_chain;  // clean, no labels
    std::vector<LevelDataset> test_chain;   // corrupted at the base, labels at every level
    std::vector<std::size_t> injected_features;
};

// Full experiment: a clean training chain (row seed = cfg.seed), and a test
// chain from a fresh clean draw (row seed = cfg.seed + 1) with anomalies
// injected at the finest level and labels propagated upward.
Experiment generate_experiment(const GenConfig& cfg, const HierarchySpec& spec);

}  // namespace hrpca

#endif  // HRPCA_SYNTHGEN_HPP
