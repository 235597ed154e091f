#ifndef HRPCA_CSV_HPP
#define HRPCA_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hrpca/attribution.hpp"
#include "hrpca/matrix.hpp"
#include "hrpca/metrics.hpp"

namespace hrpca {

// Shortest decimal that round-trips to the same double (via to_chars).
std::string format_double(double v);

// RFC-4180 style escaping: quotes the field when it contains a comma,
// quote, or newline.
std::string csv_escape(const std::string& field);

// Matrix files: header "row_id,<feature...>", one entity per line. An
// optional "timestamp" column directly after row_id carries ISO-8601 UTC
// batch instants.
void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path);

struct MatrixCsv {
    FeatureMatrix matrix;
    std::optional<std::vector<std::int64_t>> timestamps;
};

MatrixCsv read_matrix_csv(const std::filesystem::path& path);

// Label files: "row_id,label" with 0/1 labels.
void write_labels_csv(const std::vector<std::string>& row_ids,
                      const std::vector<bool>& labels,
                      const std::filesystem::path& path);

std::vector<bool> read_labels_csv(const std::filesystem::path& path,
                                  const std::vector<std::string>& expected_row_ids);

// Score files: "row_id,score,flagged".
void write_scores_csv(const std::vector<std::string>& row_ids,
                      const std::vector<double>& scores,
                      const std::vector<bool>& flags,
                      const std::filesystem::path& path);

struct ScoresCsv {
    std::vector<std::string> row_ids;
    std::vector<double> scores;
    std::vector<bool> flags;
};

ScoresCsv read_scores_csv(const std::filesystem::path& path);

// Change-log files: "timestamp,description", ISO-8601 UTC, sorted ascending.
std::vector<ChangeLogEvent> read_changelog_csv(const std::filesystem::path& path);

// Evaluation summary: "level,best_threshold,precision,recall,f1" at full
// precision (rounding happens only in the printed table).
void write_evaluation_csv(const std::vector<LevelEvalRow>& rows,
                          const std::filesystem::path& path);

// Per-threshold sweep curve: "threshold,tp,fp,fn,tn,precision,recall,f1".
void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

// Attribution records: fixed columns, then per-mode projections and
// z-scores packed as ';'-joined lists.
void write_attribution_csv(const std::vector<AttributionRecord>& records,
                           const std::filesystem::path& path);

// Writes `text` atomically (temp file + rename).
void write_text_file(const std::string& text, const std::filesystem::path& path);

}  // namespace hrpca

#endif  // HRPCA_CSV_HPP
