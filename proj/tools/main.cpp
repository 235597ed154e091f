// hrpca: command-line front end for the hierarchical robust-PCA audit
// toolkit. Subcommands cover the whole pipeline: generate synthetic
// hierarchical data, fit per-level models, audit new data against a stored
// bundle, sweep/evaluate detection quality, attribute flagged rows to
// eigenmodes and features, and render residual/score reports as SVG.
//
// Exit codes: 0 success, 2 input or config error, 3 numerical failure,
// 4 schema mismatch.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hrpca/attribution.hpp"
#include "hrpca/csv.hpp"
#include "hrpca/errors.hpp"
#include "hrpca/hierarchy.hpp"
#include "hrpca/linalg.hpp"
#include "hrpca/metrics.hpp"
#include "hrpca/model.hpp"
#include "hrpca/model_store.hpp"
#include "hrpca/svg_report.hpp"
#include "hrpca/synthgen.hpp"
#include "hrpca/timeutil.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitSchema = 4;

struct ExperimentConfig {
    hrpca::GenConfig generator;
    hrpca::HierarchySpec hierarchy;
    hrpca::FitConfig fit;
};

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.hierarchy.levels = {"interaction", "session", "profile", "account"};
    cfg.hierarchy.fan_out = {5, 5, 5};
    cfg.hierarchy.agg_op = hrpca::AggOp::kMean;
    cfg.fit.rank_mode = hrpca::FitConfig::RankMode::kFixed;
    cfg.fit.fixed_rank = 1;
    return cfg;
}

void check_known_keys(const json& obj, const std::vector<std::string>& known,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw hrpca::InvalidConfig("unknown key '" + key + "' in " + where);
        }
    }
}

void parse_generator(const json& j, hrpca::GenConfig& g) {
    check_known_keys(j,
                     {"n_base_rows", "n_features", "true_rank", "noise_floor_std",
                      "anomaly_fraction", "anomaly_magnitude",
                      "affected_feature_fraction", "seed"},
                     "generator");
    g.n_base_rows = j.value("n_base_rows", g.n_base_rows);
    g.n_features = j.value("n_features", g.n_features);
    g.true_rank = j.value("true_rank", g.true_rank);
    g.noise_floor_std = j.value("noise_floor_std", g.noise_floor_std);
    g.anomaly_fraction = j.value("anomaly_fraction", g.anomaly_fraction);
    g.anomaly_magnitude = j.value("anomaly_magnitude", g.anomaly_magnitude);
    g.affected_feature_fraction =
        j.value("affected_feature_fraction", g.affected_feature_fraction);
    g.seed = j.value("seed", g.seed);
}

void parse_hierarchy(const json& j, hrpca::HierarchySpec& h) {
    check_known_keys(j, {"levels", "fan_out", "agg_op"}, "hierarchy");
    if (j.contains("levels")) h.levels = j["levels"].get<std::vector<std::string>>();
    if (j.contains("fan_out")) h.fan_out = j["fan_out"].get<std::vector<std::size_t>>();
    if (j.contains("agg_op")) {
        const auto op = j["agg_op"].get<std::string>();
        if (op == "mean") h.agg_op = hrpca::AggOp::kMean;
        else if (op == "sum") h.agg_op = hrpca::AggOp::kSum;
        else throw hrpca::InvalidConfig("agg_op must be 'mean' or 'sum', got '" + op + "'");
    }
}

void parse_fit(const json& j, hrpca::FitConfig& f) {
    check_known_keys(j,
                     {"rank_mode", "fixed_rank", "variance_cutoff", "threshold_mode",
                      "fixed_threshold", "dynamic_k"},
                     "fit");
    if (j.contains("rank_mode")) {
        const auto mode = j["rank_mode"].get<std::string>();
        if (mode == "fixed") f.rank_mode = hrpca::FitConfig::RankMode::kFixed;
        else if (mode == "explained_variance")
            f.rank_mode = hrpca::FitConfig::RankMode::kExplainedVariance;
        else
            throw hrpca::InvalidConfig(
                "rank_mode must be 'fixed' or 'explained_variance', got '" + mode + "'");
    }
    f.fixed_rank = j.value("fixed_rank", f.fixed_rank);
    f.variance_cutoff = j.value("variance_cutoff", f.variance_cutoff);
    if (j.contains("threshold_mode")) {
        const auto mode = j["threshold_mode"].get<std::string>();
        if (mode == "fixed") f.threshold_mode = hrpca::FitConfig::ThresholdMode::kFixed;
        else if (mode == "dynamic")
            f.threshold_mode = hrpca::FitConfig::ThresholdMode::kDynamic;
        else
            throw hrpca::InvalidConfig(
                "threshold_mode must be 'fixed' or 'dynamic', got '" + mode + "'");
    }
    f.fixed_threshold = j.value("fixed_threshold", f.fixed_threshold);
    f.dynamic_k = j.value("dynamic_k", f.dynamic_k);
}

ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override) {
    ExperimentConfig cfg = default_config();
    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw hrpca::StorageError("cannot open config file", path);
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw hrpca::ParseError(std::string("config is not valid JSON: ") + e.what());
        }
        try {
            check_known_keys(doc, {"generator", "hierarchy", "fit"}, "config");
            if (doc.contains("generator")) parse_generator(doc["generator"], cfg.generator);
            if (doc.contains("hierarchy")) parse_hierarchy(doc["hierarchy"], cfg.hierarchy);
            if (doc.contains("fit")) parse_fit(doc["fit"], cfg.fit);
        } catch (const json::exception& e) {
            throw hrpca::ParseError(std::string("config document malformed: ") + e.what());
        }
    }
    if (seed_override) cfg.generator.seed = *seed_override;
    cfg.generator.validate();
    cfg.hierarchy.validate();
    cfg.fit.validate();
    return cfg;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
    json j;
    j["generator"] = {{"n_base_rows", cfg.generator.n_base_rows},
                      {"n_features", cfg.generator.n_features},
                      {"true_rank", cfg.generator.true_rank},
                      {"noise_floor_std", cfg.generator.noise_floor_std},
                      {"anomaly_fraction", cfg.generator.anomaly_fraction},
                      {"anomaly_magnitude", cfg.generator.anomaly_magnitude},
                      {"affected_feature_fraction", cfg.generator.affected_feature_fraction},
                      {"seed", cfg.generator.seed}};
    j["hierarchy"] = {{"levels", cfg.hierarchy.levels},
                      {"fan_out", cfg.hierarchy.fan_out},
                      {"agg_op", cfg.hierarchy.agg_op == hrpca::AggOp::kMean ? "mean" : "sum"}};
    return j.dump();
}

std::string now_iso8601() {
    return hrpca::format_iso8601_utc(static_cast<std::int64_t>(std::time(nullptr)));
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw hrpca::StorageError("cannot create output directory", dir);
    }
}

// Returns the bundle's models, filtered to --level when given.
std::vector<hrpca::LevelModel> select_levels(const hrpca::ModelBundle& bundle,
                                             const std::string& only_level) {
    if (only_level.empty()) return bundle.models;
    for (const auto& m : bundle.models) {
        if (m.level_name == only_level) return {m};
    }
    throw hrpca::InvalidInput("bundle has no level named '" + only_level + "'");
}

int cmd_generate(const std::string& config_path,
                 std::optional<std::uint64_t> seed_override, const std::string& out_dir) {
    const ExperimentConfig cfg = load_config(config_path, seed_override);
    ensure_out_dir(out_dir);
    const hrpca::Experiment exp = hrpca::generate_experiment(cfg.generator, cfg.hierarchy);
    for (std::size_t i = 0; i < exp.train_chain.size(); ++i) {
        const auto& train = exp.train_chain[i];
        const auto& test = exp.test_chain[i];
        const fs::path base = fs::path(out_dir);
        hrpca::write_matrix_csv(train.matrix, base / (train.level_name + ".train.csv"));
        hrpca::write_matrix_csv(test.matrix, base / (test.level_name + ".csv"));
        hrpca::write_labels_csv(test.matrix.row_ids, *test.labels,
                                base / (test.level_name + ".labels.csv"));
        std::cout << test.level_name << ": " << test.matrix.n_rows << " rows, "
                  << test.matrix.n_cols << " features\n";
    }
    return kExitOk;
}

int cmd_fit(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            const std::string& in_dir, const std::string& bundle_path) {
    const ExperimentConfig cfg = load_config(config_path, seed_override);
    hrpca::ModelBundle bundle;
    bundle.created_at = now_iso8601();
    bundle.fingerprint = config_fingerprint(cfg);
    for (const std::string& level : cfg.hierarchy.levels) {
        const fs::path path = fs::path(in_dir) / (level + ".train.csv");
        const hrpca::MatrixCsv data = hrpca::read_matrix_csv(path);
        bundle.models.push_back(hrpca::fit(data.matrix, cfg.fit, level));
        std::cout << level << ": rank " << bundle.models.back().rank << ", threshold "
                  << hrpca::format_double(bundle.models.back().threshold) << '\n';
    }
    hrpca::save_bundle(bundle, bundle_path);
    return kExitOk;
}

int cmd_audit(const std::string& bundle_path, const std::string& in_dir,
              const std::string& out_dir, const std::string& only_level,
              std::optional<double> threshold_override) {
    const hrpca::ModelBundle bundle = hrpca::load_bundle(bundle_path);
    ensure_out_dir(out_dir);
    for (const auto& model : select_levels(bundle, only_level)) {
        const fs::path in_path = fs::path(in_dir) / (model.level_name + ".csv");
        const hrpca::MatrixCsv data = hrpca::read_matrix_csv(in_path);
        const std::vector<double> scores = hrpca::score(model, data.matrix);
        const double threshold = threshold_override.value_or(model.threshold);
        const std::vector<bool> flags = hrpca::flag(scores, threshold);
        hrpca::write_scores_csv(data.matrix.row_ids, scores, flags,
                                fs::path(out_dir) / (model.level_name + ".scores.csv"));
        std::size_t n_flagged = 0;
        for (bool f : flags) n_flagged += f ? 1 : 0;
        std::cout << model.level_name << ": " << n_flagged << "/" << scores.size()
                  << " rows flagged at threshold " << hrpca::format_double(threshold)
                  << '\n';
    }
    return kExitOk;
}

// Shared by `sweep` and `evaluate`: per-level F1-optimal threshold search.
int cmd_evaluate(const std::string& bundle_path, const std::string& in_dir,
                 const std::string& out_dir, const std::string& format,
                 bool write_curves) {
    const hrpca::ModelBundle bundle = hrpca::load_bundle(bundle_path);
    ensure_out_dir(out_dir);

    std::vector<hrpca::LevelDataset> chain;
    for (const auto& model : bundle.models) {
        const fs::path data_path = fs::path(in_dir) / (model.level_name + ".csv");
        const fs::path labels_path = fs::path(in_dir) / (model.level_name + ".labels.csv");
        hrpca::LevelDataset level;
        level.level_name = model.level_name;
        level.matrix = hrpca::read_matrix_csv(data_path).matrix;
        level.labels = hrpca::read_labels_csv(labels_path, level.matrix.row_ids);
        chain.push_back(std::move(level));
    }
    const std::vector<hrpca::LevelEvalRow> rows =
        hrpca::evaluate_hierarchy(bundle.models, chain);
    hrpca::write_evaluation_csv(rows, fs::path(out_dir) / "evaluation.csv");

    if (write_curves) {
        for (std::size_t i = 0; i < bundle.models.size(); ++i) {
            const std::vector<double> scores =
                hrpca::score(bundle.models[i], chain[i].matrix);
            const hrpca::SweepResult sweep =
                hrpca::threshold_sweep(scores, *chain[i].labels);
            hrpca::write_sweep_csv(
                sweep, fs::path(out_dir) / (chain[i].level_name + ".sweep.csv"));
        }
    }

    if (format == "csv") {
        std::cout << "level,best_threshold,precision,recall,f1\n";
        for (const auto& r : rows) {
            std::cout << r.level_name << ',' << hrpca::format_double(r.best_threshold)
                      << ',' << hrpca::format_double(r.precision) << ','
                      << hrpca::format_double(r.recall) << ','
                      << hrpca::format_double(r.f1) << '\n';
        }
    } else {
        // Two-decimal rounding happens only here, at the reporting boundary.
        std::printf("%-14s %10s %10s %8s %9s\n", "Level", "Threshold", "Precision",
                    "Recall", "F1 Score");
        for (const auto& r : rows) {
            std::printf("%-14s %10.2f %10.2f %8.2f %9.2f\n", r.level_name.c_str(),
                        r.best_threshold, r.precision, r.recall, r.f1);
        }
    }
    return kExitOk;
}

int cmd_attribute(const std::string& bundle_path, const std::string& in_dir,
                  const std::string& out_dir, const std::string& only_level,
                  const std::string& changelog_path, const std::string& window,
                  const std::string& train_dir, double z_threshold,
                  const std::string& basis) {
    const hrpca::ModelBundle bundle = hrpca::load_bundle(bundle_path);
    ensure_out_dir(out_dir);
    const std::int64_t window_seconds = hrpca::parse_duration_seconds(window);
    std::vector<hrpca::ChangeLogEvent> events;
    if (!changelog_path.empty()) {
        events = hrpca::read_changelog_csv(changelog_path);
    }

    for (const auto& model : select_levels(bundle, only_level)) {
        const fs::path in_path = fs::path(in_dir) / (model.level_name + ".csv");
        const hrpca::MatrixCsv data = hrpca::read_matrix_csv(in_path);

        // Flags always come from the stored (clean-trained) model. The
        // eigenbasis used for backtracking is either that model or, with
        // --basis observed, a basis refit on the audited batch so modes can
        // pick up the deviation pattern itself.
        hrpca::LevelModel attr_model = model;
        if (basis == "observed") {
            hrpca::FitConfig refit;
            refit.rank_mode = hrpca::FitConfig::RankMode::kExplainedVariance;
            refit.variance_cutoff = 0.999;
            attr_model = hrpca::fit(data.matrix, refit, model.level_name);
        }

        // Reference stats come from training data when provided, otherwise
        // from the audited batch itself.
        hrpca::ProjectionStats stats;
        if (!train_dir.empty()) {
            const fs::path train_path =
                fs::path(train_dir) / (model.level_name + ".train.csv");
            stats = hrpca::reference_stats(attr_model,
                                           hrpca::read_matrix_csv(train_path).matrix);
        } else {
            stats = hrpca::reference_stats(attr_model, data.matrix);
        }

        const std::vector<double> scores = hrpca::score(model, data.matrix);
        const std::vector<bool> flags = hrpca::flag(scores, model.threshold);

        hrpca::FeatureMatrix flagged;
        flagged.n_cols = data.matrix.n_cols;
        flagged.col_names = data.matrix.col_names;
        std::vector<std::int64_t> timestamps;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (!flags[i]) continue;
            flagged.row_ids.push_back(data.matrix.row_ids[i]);
            const auto row = data.matrix.row(i);
            flagged.values.insert(flagged.values.end(), row.begin(), row.end());
            timestamps.push_back(data.timestamps ? (*data.timestamps)[i] : 0);
        }
        flagged.n_rows = flagged.row_ids.size();

        std::vector<hrpca::AttributionRecord> records =
            hrpca::attribute_rows(attr_model, flagged, stats, z_threshold);
        hrpca::annotate(records, timestamps, events, window_seconds);
        hrpca::write_attribution_csv(
            records, fs::path(out_dir) / (model.level_name + ".attribution.csv"));
        std::cout << model.level_name << ": " << records.size()
                  << " flagged rows attributed\n";
    }
    return kExitOk;
}

int cmd_report(const std::string& bundle_path, const std::string& in_dir,
               const std::string& out_dir, const std::string& only_level,
               std::optional<double> threshold_override) {
    const hrpca::ModelBundle bundle = hrpca::load_bundle(bundle_path);
    ensure_out_dir(out_dir);
    for (const auto& model : select_levels(bundle, only_level)) {
        const fs::path in_path = fs::path(in_dir) / (model.level_name + ".csv");
        const hrpca::MatrixCsv data = hrpca::read_matrix_csv(in_path);
        const hrpca::Decomposition dec = hrpca::decompose(model, data.matrix);
        const double threshold = threshold_override.value_or(model.threshold);
        const std::vector<bool> flags = hrpca::flag(dec.scores, threshold);

        const fs::path base = fs::path(out_dir);
        hrpca::write_matrix_csv(dec.sparse, base / (model.level_name + ".residuals.csv"));
        hrpca::write_scores_csv(data.matrix.row_ids, dec.scores, flags,
                                base / (model.level_name + ".scores.csv"));
        hrpca::write_text_file(
            hrpca::residual_heatmap_svg(dec.sparse,
                                        model.level_name + " residual heatmap"),
            base / (model.level_name + ".residual_heatmap.svg"));
        hrpca::write_text_file(
            hrpca::score_line_plot_svg(dec.scores, threshold,
                                       model.level_name + " anomaly scores"),
            base / (model.level_name + ".scores.svg"));
        std::cout << model.level_name << ": report written\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical robust-PCA data-quality audit toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", in_dir = ".", bundle_path = "bundle.json";
    std::string only_level, changelog_path, window = "24h", train_dir;
    std::string format = "table";
    std::string basis = "model";
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold_override;
    double z_threshold = 3.0;

    auto* generate = app.add_subcommand("generate", "Generate a synthetic experiment");
    generate->add_option("--config", config_path, "Experiment config JSON");
    generate->add_option("--seed", seed, "Override the generator seed");
    generate->add_option("--out", out_dir, "Output directory");

    auto* fit = app.add_subcommand("fit", "Fit per-level models on training CSVs");
    fit->add_option("--config", config_path, "Experiment config JSON");
    fit->add_option("--seed", seed, "Override the generator seed (fingerprint only)");
    fit->add_option("--in", in_dir, "Directory with <level>.train.csv files");
    fit->add_option("--bundle", bundle_path, "Bundle file to write");

    auto* audit = app.add_subcommand("audit", "Score and flag data against a bundle");
    audit->add_option("--bundle", bundle_path, "Bundle file to read");
    audit->add_option("--in", in_dir, "Directory with <level>.csv files");
    audit->add_option("--out", out_dir, "Output directory");
    audit->add_option("--level", only_level, "Restrict to one level");
    audit->add_option("--threshold", threshold_override, "Override the stored threshold");

    auto* sweep = app.add_subcommand("sweep", "Threshold sweep with per-point curves");
    auto* evaluate = app.add_subcommand("evaluate", "Per-level F1-optimal summary table");
    for (auto* cmd : {sweep, evaluate}) {
        cmd->add_option("--bundle", bundle_path, "Bundle file to read");
        cmd->add_option("--in", in_dir, "Directory with <level>.csv and <level>.labels.csv");
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--format", format, "Console format: table or csv")
            ->check(CLI::IsMember({"table", "csv"}));
    }

    auto* attribute = app.add_subcommand("attribute", "Attribute flagged rows to modes");
    attribute->add_option("--bundle", bundle_path, "Bundle file to read");
    attribute->add_option("--in", in_dir, "Directory with <level>.csv files");
    attribute->add_option("--out", out_dir, "Output directory");
    attribute->add_option("--level", only_level, "Restrict to one level");
    attribute->add_option("--changelog", changelog_path,
                          "Change-log CSV (timestamp,description)");
    attribute->add_option("--window", window, "Annotation window (e.g. 24h, 90m)");
    attribute->add_option("--train", train_dir,
                          "Directory with <level>.train.csv reference data");
    attribute->add_option("--z-threshold", z_threshold, "Dominant-mode z threshold");
    attribute->add_option("--basis", basis,
                          "Eigenbasis for backtracking: the stored model or one "
                          "refit on the audited batch")
        ->check(CLI::IsMember({"model", "observed"}));

    auto* report = app.add_subcommand("report", "Residual heatmap and score plots");
    report->add_option("--bundle", bundle_path, "Bundle file to read");
    report->add_option("--in", in_dir, "Directory with <level>.csv files");
    report->add_option("--out", out_dir, "Output directory");
    report->add_option("--level", only_level, "Restrict to one level");
    report->add_option("--threshold", threshold_override, "Override the stored threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, seed, out_dir);
        if (fit->parsed()) return cmd_fit(config_path, seed, in_dir, bundle_path);
        if (audit->parsed())
            return cmd_audit(bundle_path, in_dir, out_dir, only_level, threshold_override);
        if (sweep->parsed())
            return cmd_evaluate(bundle_path, in_dir, out_dir, format, true);
        if (evaluate->parsed())
            return cmd_evaluate(bundle_path, in_dir, out_dir, format, false);
        if (attribute->parsed())
            return cmd_attribute(bundle_path, in_dir, out_dir, only_level, changelog_path,
                                 window, train_dir, z_threshold, basis);
        if (report->parsed())
            return cmd_report(bundle_path, in_dir, out_dir, only_level, threshold_override);
    } catch (const hrpca::SchemaMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const hrpca::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const hrpca::DegenerateSpectrum& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const hrpca::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
