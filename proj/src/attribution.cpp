#include "hrpca/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hrpca/errors.hpp"

namespace hrpca {

std::vector<double> projection_scores(const LevelModel& model,
                                      std::span<const double> row) {
    const std::size_t d = model.n_features();
    if (row.size() != d) {
        throw SchemaMismatch("row has " + std::to_string(row.size()) +
                             " values, model expects " + std::to_string(d));
    }
    std::vector<double> p(model.rank, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double c = row[j] - model.col_means[j];
        for (std::size_t k = 0; k < model.rank; ++k) {
            p[k] += c * model.u(j, k);
        }
    }
    return p;
}

ProjectionStats reference_stats(const LevelModel& model, const FeatureMatrix& x_train) {
    if (x_train.n_cols != model.n_features() ||
        x_train.col_names != model.feature_names) {
        throw SchemaMismatch("reference data columns do not match the model");
    }
    if (x_train.n_rows == 0) {
        throw InvalidInput("reference data must have at least one row");
    }
    const std::size_t r = model.rank, n = x_train.n_rows;
    ProjectionStats stats;
    stats.mean.assign(r, 0.0);
    stats.stddev.assign(r, 0.0);

    std::vector<std::vector<double>> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        all[i] = projection_scores(model, x_train.row(i));
        for (std::size_t k = 0; k < r; ++k) stats.mean[k] += all[i][k];
    }
    for (double& m : stats.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            const double dlt = all[i][k] - stats.mean[k];
            stats.stddev[k] += dlt * dlt;
        }
    }
    for (double& s : stats.stddev) s = std::sqrt(s / static_cast<double>(n));
    return stats;
}

namespace {

double z_score(double p, double mean, double stddev) {
    if (stddev == 0.0) {
        return p == mean ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::abs(p - mean) / stddev;
}

}  // namespace

std::optional<DominantMode> dominant_mode(const std::vector<double>& projections,
                                          const ProjectionStats& stats,
                                          double z_threshold) {
    if (projections.size() != stats.mean.size()) {
        throw SchemaMismatch("projection count does not match reference stats");
    }
    std::optional<DominantMode> best;
    for (std::size_t k = 0; k < projections.size(); ++k) {
        const double z = z_score(projections[k], stats.mean[k], stats.stddev[k]);
        if (!best || z > best->z) {
            best = DominantMode{k, z};
        }
    }
    if (best && best->z > z_threshold) {
        return best;
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, double>> top_features(const LevelModel& model,
                                                         std::size_t mode,
                                                         std::size_t k) {
    if (mode >= model.rank) {
        throw InvalidInput("mode " + std::to_string(mode) + " out of range for rank " +
                           std::to_string(model.rank));
    }
    if (k < 1) {
        throw InvalidInput("top_features needs k >= 1");
    }
    const std::size_t d = model.n_features();
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(model.u(a, mode)) > std::abs(model.u(b, mode));
    });
    const std::size_t take = std::min(k, d);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.emplace_back(model.feature_names[idx[i]], std::abs(model.u(idx[i], mode)));
    }
    return out;
}

std::vector<double> reconstruct_from_modes(const LevelModel& model,
                                           const std::vector<double>& projections) {
    if (projections.size() != model.rank) {
        throw SchemaMismatch("expected " + std::to_string(model.rank) +
                             " projections, got " + std::to_string(projections.size()));
    }
    const std::size_t d = model.n_features();
    std::vector<double> row(model.col_means);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < model.rank; ++k) {
            row[j] += projections[k] * model.u(j, k);
        }
    }
    return row;
}

ProjectionSeries projection_series(const LevelModel& model,
                                   const std::vector<TimedBatch>& batches) {
    for (std::size_t i = 0; i + 1 < batches.size(); ++i) {
        if (batches[i].timestamp > batches[i + 1].timestamp) {
            throw InvalidInput("batches must be ordered by timestamp");
        }
    }
    ProjectionSeries series;
    series.mean_abs.assign(model.rank, {});
    for (const TimedBatch& batch : batches) {
        if (batch.matrix.n_rows == 0) {
            series.warnings.push_back("skipped empty batch at " +
                                      std::to_string(batch.timestamp));
            continue;
        }
        std::vector<double> sums(model.rank, 0.0);
        for (std::size_t i = 0; i < batch.matrix.n_rows; ++i) {
            const std::vector<double> p = projection_scores(model, batch.matrix.row(i));
            for (std::size_t k = 0; k < model.rank; ++k) sums[k] += std::abs(p[k]);
        }
        series.timestamps.push_back(batch.timestamp);
        for (std::size_t k = 0; k < model.rank; ++k) {
            series.mean_abs[k].push_back(sums[k] /
                                         static_cast<double>(batch.matrix.n_rows));
        }
    }
    return series;
}

std::vector<AttributionRecord> attribute_rows(const LevelModel& model,
                                              const FeatureMatrix& x,
                                              const ProjectionStats& stats,
                                              double z_threshold, std::size_t top_k) {
    std::vector<AttributionRecord> records;
    records.reserve(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        AttributionRecord rec;
        rec.row_id = x.row_ids[i];
        rec.projections = projection_scores(model, x.row(i));
        rec.z_scores.resize(model.rank);
        for (std::size_t k = 0; k < model.rank; ++k) {
            rec.z_scores[k] = z_score(rec.projections[k], stats.mean[k], stats.stddev[k]);
        }
        if (const auto dom = dominant_mode(rec.projections, stats, z_threshold)) {
            rec.dominant_mode = dom->mode;
            rec.dominant_z = dom->z;
            rec.top_features = top_features(model, dom->mode, top_k);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void annotate(std::vector<AttributionRecord>& records,
              const std::vector<std::int64_t>& timestamps,
              const std::vector<ChangeLogEvent>& events,
              std::int64_t window_seconds) {
    if (records.size() != timestamps.size()) {
        throw ShapeError("records and timestamps differ in size");
    }
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        if (events[i].timestamp > events[i + 1].timestamp) {
            throw InvalidInput("change-log events must be sorted ascending");
        }
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        AttributionRecord& rec = records[i];
        std::string tag;
        if (rec.dominant_mode && !rec.top_features.empty()) {
            tag = "mode " + std::to_string(*rec.dominant_mode) + " / feature " +
                  rec.top_features.front().first;
        } else {
            tag = "unattributed";
        }
        // Latest event at or before the anomaly and within the window.
        const std::int64_t t = timestamps[i];
        const ChangeLogEvent* hit = nullptr;
        for (const ChangeLogEvent& ev : events) {
            if (ev.timestamp > t) break;
            if (t - ev.timestamp <= window_seconds) hit = &ev;
        }
        if (hit != nullptr) {
            tag += "; near change: " + hit->description;
        }
        rec.annotation_tag = std::move(tag);
    }
}

}  // namespace hrpca
