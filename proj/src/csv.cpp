#include "hrpca/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hrpca/errors.hpp"
#include "hrpca/timeutil.hpp"

namespace hrpca {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw ParseError("unterminated quote on line " + std::to_string(line_no));
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("bad numeric value '" + s + "' on line " +
                         std::to_string(line_no));
    }
    return v;
}

bool parse_bool01(const std::string& s, std::size_t line_no) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw ParseError("expected 0 or 1, got '" + s + "' on line " +
                     std::to_string(line_no));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open file", path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (lines.empty()) {
        throw ParseError("file is empty: " + path.string());
    }
    return lines;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_text_file(const std::string& text, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw StorageError("cannot open file for writing", tmp.string());
        }
        out << text;
        if (!out.flush()) {
            throw StorageError("write failed", tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw StorageError("cannot move file into place", path.string());
    }
}

void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "row_id";
    for (const auto& name : m.col_names) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        out << csv_escape(m.row_ids[i]);
        for (std::size_t j = 0; j < m.n_cols; ++j) out << ',' << format_double(m.at(i, j));
        out << '\n';
    }
    write_text_file(out.str(), path);
}

MatrixCsv read_matrix_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    const std::vector<std::string> header = split_csv_line(lines[0], 1);
    if (header.empty() || header[0] != "row_id") {
        throw ParseError("matrix CSV must start with a row_id column: " + path.string());
    }
    const bool has_timestamps = header.size() > 1 && header[1] == "timestamp";
    const std::size_t first_feature = has_timestamps ? 2 : 1;
    const std::size_t d = header.size() - first_feature;

    MatrixCsv out;
    out.matrix.n_cols = d;
    out.matrix.col_names.assign(header.begin() + static_cast<long>(first_feature),
                                header.end());
    if (has_timestamps) out.timestamps.emplace();

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> fields = split_csv_line(lines[li], li + 1);
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(li + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        out.matrix.row_ids.push_back(fields[0]);
        if (has_timestamps) {
            out.timestamps->push_back(parse_iso8601_utc(fields[1]));
        }
        for (std::size_t j = 0; j < d; ++j) {
            out.matrix.values.push_back(parse_double(fields[first_feature + j], li + 1));
        }
    }
    out.matrix.n_rows = out.matrix.row_ids.size();
    out.matrix.validate();
    return out;
}

void write_labels_csv(const std::vector<std::string>& row_ids,
                      const std::vector<bool>& labels,
                      const std::filesystem::path& path) {
    std::ostringstream out;
    out << "row_id,label\n";
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out << csv_escape(row_ids[i]) << ',' << (labels[i] ? '1' : '0') << '\n';
    }
    write_text_file(out.str(), path);
}

std::vector<bool> read_labels_csv(const std::filesystem::path& path,
                                  const std::vector<std::string>& expected_row_ids) {
    const std::vector<std::string> lines = read_lines(path);
    if (split_csv_line(lines[0], 1) != std::vector<std::string>{"row_id", "label"}) {
        throw ParseError("labels CSV must have header row_id,label: " + path.string());
    }
    std::vector<std::string> ids;
    std::vector<bool> labels;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> fields = split_csv_line(lines[li], li + 1);
        if (fields.size() != 2) {
            throw ParseError("labels line " + std::to_string(li + 1) +
                             " must have 2 fields");
        }
        ids.push_back(fields[0]);
        labels.push_back(parse_bool01(fields[1], li + 1));
    }
    if (ids != expected_row_ids) {
        throw SchemaMismatch("label row ids do not match the data rows: " +
                             path.string());
    }
    return labels;
}

void write_scores_csv(const std::vector<std::string>& row_ids,
                      const std::vector<double>& scores,
                      const std::vector<bool>& flags,
                      const std::filesystem::path& path) {
    std::ostringstream out;
    out << "row_id,score,flagged\n";
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        out << csv_escape(row_ids[i]) << ',' << format_double(scores[i]) << ','
            << (flags[i] ? '1' : '0') << '\n';
    }
    write_text_file(out.str(), path);
}

ScoresCsv read_scores_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (split_csv_line(lines[0], 1) !=
        std::vector<std::string>{"row_id", "score", "flagged"}) {
        throw ParseError("scores CSV must have header row_id,score,flagged: " +
                         path.string());
    }
    ScoresCsv out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> fields = split_csv_line(lines[li], li + 1);
        if (fields.size() != 3) {
            throw ParseError("scores line " + std::to_string(li + 1) +
                             " must have 3 fields");
        }
        out.row_ids.push_back(fields[0]);
        out.scores.push_back(parse_double(fields[1], li + 1));
        out.flags.push_back(parse_bool01(fields[2], li + 1));
    }
    return out;
}

std::vector<ChangeLogEvent> read_changelog_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (split_csv_line(lines[0], 1) !=
        std::vector<std::string>{"timestamp", "description"}) {
        throw ParseError("change log must have header timestamp,description: " +
                         path.string());
    }
    std::vector<ChangeLogEvent> events;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> fields = split_csv_line(lines[li], li + 1);
        if (fields.size() != 2) {
            throw ParseError("change-log line " + std::to_string(li + 1) +
                             " must have 2 fields");
        }
        events.push_back({parse_iso8601_utc(fields[0]), fields[1]});
    }
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        if (events[i].timestamp > events[i + 1].timestamp) {
            throw InvalidInput("change-log events must be sorted ascending: " +
                               path.string());
        }
    }
    return events;
}

void write_evaluation_csv(const std::vector<LevelEvalRow>& rows,
                          const std::filesystem::path& path) {
    std::ostringstream out;
    out << "level,best_threshold,precision,recall,f1\n";
    for (const LevelEvalRow& r : rows) {
        out << csv_escape(r.level_name) << ',' << format_double(r.best_threshold) << ','
            << format_double(r.precision) << ',' << format_double(r.recall) << ','
            << format_double(r.f1) << '\n';
    }
    write_text_file(out.str(), path);
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "threshold,tp,fp,fn,tn,precision,recall,f1\n";
    for (const SweepPoint& pt : sweep.points) {
        out << format_double(pt.threshold) << ',' << pt.counts.tp << ',' << pt.counts.fp
            << ',' << pt.counts.fn << ',' << pt.counts.tn << ','
            << format_double(pt.precision) << ',' << format_double(pt.recall) << ','
            << format_double(pt.f1) << '\n';
    }
    write_text_file(out.str(), path);
}

void write_attribution_csv(const std::vector<AttributionRecord>& records,
                           const std::filesystem::path& path) {
    std::ostringstream out;
    out << "row_id,dominant_mode,dominant_z,top_feature,top_weight,annotation_tag,"
           "projections,z_scores\n";
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) s += ';';
            s += format_double(v[i]);
        }
        return s;
    };
    for (const AttributionRecord& rec : records) {
        out << csv_escape(rec.row_id) << ',';
        if (rec.dominant_mode) {
            out << *rec.dominant_mode << ',' << format_double(rec.dominant_z) << ','
                << csv_escape(rec.top_features.front().first) << ','
                << format_double(rec.top_features.front().second);
        } else {
            out << ",,,";
        }
        out << ',' << csv_escape(rec.annotation_tag) << ',' << join(rec.projections)
            << ',' << join(rec.z_scores) << '\n';
    }
    write_text_file(out.str(), path);
}

}  // namespace hrpca
