#ifndef HRPCA_METRICS_HPP
#define HRPCA_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "hrpca/hierarchy.hpp"
#include "hrpca/model.hpp"

namespace hrpca {

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Standard 2x2 counts of predicted flags against ground-truth labels.
Confusion confusion(const std::vector<bool>& flags, const std::vector<bool>& labels);

// tp / (tp + fp), tp / (tp + fn), and their harmonic mean. All three use
// the 0/0 -> 0 convention, so results always lie in [0, 1].
double precision(const Confusion& c);
double recall(const Confusion& c);
double f1(const Confusion& c);

struct SweepPoint {
    double threshold = 0.0;
    Confusion counts;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // ascending thresholds
    // Smallest threshold attaining best_f1; when best_f1 is 0 the grid's
    // top point (which flags nothing) is reported instead.
    double best_threshold = 0.0;
    double best_f1 = 0.0;
};

// Evaluates flagging at every grid threshold. The default grid is the
// midpoints between consecutive distinct sorted scores plus one point below
// the minimum and one above the maximum, which covers every flag set a
// threshold can produce.
SweepResult threshold_sweep(const std::vector<double>& scores,
                            const std::vector<bool>& labels,
                            const std::vector<double>& grid = {});

struct LevelEvalRow {
    std::string level_name;
    double best_threshold = 0.0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Scores each level of the test chain with its model, sweeps thresholds,
// and reports the F1-optimal row per level. Labels must be present.
std::vector<LevelEvalRow> evaluate_hierarchy(
    const std::vector<LevelModel>& models,
    const std::vector<LevelDataset>& test_chain);

}  // namespace hrpca

#endif  // HRPCA_METRICS_HPP
