#ifndef HRPCA_ATTRIBUTION_HPP
#define HRPCA_ATTRIBUTION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrpca/matrix.hpp"
#include "hrpca/model.hpp"

namespace hrpca {

// Per-mode mean and population std of projection scores over a reference
// (training) set.
struct ProjectionStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

// A product change or deployment event to correlate anomalies with.
struct ChangeLogEvent {
    std::int64_t timestamp = 0;  // seconds since epoch, UTC
    std::string description;
};

// Diagnostic trail for one row: its coordinates along each eigenmode, the
// standardized magnitudes, the mode that best explains it (if any), and the
// features that mode loads on.
struct AttributionRecord {
    std::string row_id;
    std::vector<double> projections;  // p_j, one per mode
    std::vector<double> z_scores;     // standardized |p_j - mean_j|
    std::optional<std::size_t> dominant_mode;
    double dominant_z = 0.0;
    std::vector<std::pair<std::string, double>> top_features;  // (name, |u_ji|), desc
    std::string annotation_tag;
};

// p_j = (row - col_means) . u_j for each mode j.
std::vector<double> projection_scores(const LevelModel& model,
                                      std::span<const double> row);

// Per-mode projection statistics over every row of x_train.
ProjectionStats reference_stats(const LevelModel& model, const FeatureMatrix& x_train);

struct DominantMode {
    std::size_t mode = 0;
    double z = 0.0;
};

// z_j = |p_j - mean_j| / std_j; a zero std gives z = 0 when the projection
// equals the mean and +infinity otherwise. Returns the argmax mode when its
// z exceeds z_threshold (ties to the lowest index), nothing otherwise.
std::optional<DominantMode> dominant_mode(const std::vector<double>& projections,
                                          const ProjectionStats& stats,
                                          double z_threshold = 3.0);

// Features ranked by |u_{mode,i}| descending (ties by feature index),
// truncated to k entries.
std::vector<std::pair<std::string, double>> top_features(const LevelModel& model,
                                                         std::size_t mode,
                                                         std::size_t k);

// mu + sum_j p_j u_j. Inverse of projection_scores on the model's span.
std::vector<double> reconstruct_from_modes(const LevelModel& model,
                                           const std::vector<double>& projections);

struct TimedBatch {
    std::int64_t timestamp = 0;
    FeatureMatrix matrix;
};

struct ProjectionSeries {
    std::vector<std::int64_t> timestamps;       // batches that were kept
    std::vector<std::vector<double>> mean_abs;  // [mode][batch]: mean |p_j|
    std::vector<std::string> warnings;          // skipped empty batches
};

// Mean |p_j| per mode over each batch, in batch order. Empty batches are
// skipped with a warning record.
ProjectionSeries projection_series(const LevelModel& model,
                                   const std::vector<TimedBatch>& batches);

// Builds full records for every row of x: projections, z-scores, dominant
// mode when some z exceeds z_threshold, and that mode's top_k features.
std::vector<AttributionRecord> attribute_rows(const LevelModel& model,
                                              const FeatureMatrix& x,
                                              const ProjectionStats& stats,
                                              double z_threshold = 3.0,
                                              std::size_t top_k = 3);

// Fills each record's annotation_tag: "mode <j> / feature <name>"
// ("unattributed" when no mode dominates), plus "; near change: <desc>"
// citing the latest event within `window_seconds` before the row's
// timestamp. Events must be sorted ascending.
void annotate(std::vector<AttributionRecord>& records,
              const std::vector<std::int64_t>& timestamps,
              const std::vector<ChangeLogEvent>& events,
              std::int64_t window_seconds = 86400);

}  // namespace hrpca

#endif  // HRPCA_ATTRIBUTION_HPP
