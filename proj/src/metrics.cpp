#include "hrpca/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hrpca/errors.hpp"

namespace hrpca {

Confusion confusion(const std::vector<bool>& flags, const std::vector<bool>& labels) {
    if (flags.size() != labels.size()) {
        throw ShapeError("flags size " + std::to_string(flags.size()) +
                         " != labels size " + std::to_string(labels.size()));
    }
    Confusion c;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] && labels[i]) ++c.tp;
        else if (flags[i] && !labels[i]) ++c.fp;
        else if (!flags[i] && labels[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double precision(const Confusion& c) {
    const std::size_t denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const Confusion& c) {
    const std::size_t denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1(const Confusion& c) {
    const double p = precision(c), r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

SweepResult threshold_sweep(const std::vector<double>& scores,
                            const std::vector<bool>& labels,
                            const std::vector<double>& grid) {
    if (scores.empty()) {
        throw InvalidInput("cannot sweep over empty scores");
    }
    if (scores.size() != labels.size()) {
        throw ShapeError("scores size " + std::to_string(scores.size()) +
                         " != labels size " + std::to_string(labels.size()));
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw InvalidInput("scores must be finite");
    }

    std::vector<double> thresholds;
    if (!grid.empty()) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(grid[i]) || (i > 0 && grid[i] < grid[i - 1])) {
                throw InvalidInput("grid must be finite and ascending");
            }
        }
        thresholds = grid;
    } else {
        std::vector<double> distinct = scores;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        thresholds.push_back(distinct.front() - 1.0);
        for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
            thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
        }
        thresholds.push_back(distinct.back() + 1.0);
    }

    SweepResult result;
    result.points.reserve(thresholds.size());
    bool have_best = false;
    for (double t : thresholds) {
        SweepPoint pt;
        pt.threshold = t;
        std::vector<bool> flags(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) flags[i] = scores[i] > t;
        pt.counts = confusion(flags, labels);
        pt.precision = precision(pt.counts);
        pt.recall = recall(pt.counts);
        pt.f1 = f1(pt.counts);
        if (!have_best || pt.f1 > result.best_f1) {
            have_best = true;
            result.best_f1 = pt.f1;
            result.best_threshold = t;
        }
        result.points.push_back(pt);
    }
    if (result.best_f1 == 0.0) {
        // No threshold earns any F1; report the one that flags nothing.
        result.best_threshold = thresholds.back();
    }
    return result;
}

std::vector<LevelEvalRow> evaluate_hierarchy(
    const std::vector<LevelModel>& models,
    const std::vector<LevelDataset>& test_chain) {
    if (models.size() != test_chain.size()) {
        throw InvalidInput("need exactly one model per hierarchy level");
    }
    std::vector<LevelEvalRow> rows;
    rows.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        const LevelDataset& level = test_chain[i];
        if (!level.labels) {
            throw InvalidInput("level '" + level.level_name + "' has no labels");
        }
        if (models[i].level_name != level.level_name) {
            throw SchemaMismatch("model level '" + models[i].level_name +
                                 "' does not match data level '" + level.level_name + "'");
        }
        const std::vector<double> level_scores = score(models[i], level.matrix);
        const SweepResult sweep = threshold_sweep(level_scores, *level.labels);

        LevelEvalRow row;
        row.level_name = level.level_name;
        row.best_threshold = sweep.best_threshold;
        for (const SweepPoint& pt : sweep.points) {
            if (pt.threshold == sweep.best_threshold) {
                row.precision = pt.precision;
                row.recall = pt.recall;
                row.f1 = pt.f1;
                break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hrpca
