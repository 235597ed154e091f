#include <doctest.h>

#include <cmath>
#include <limits>

#include "hrpca/attribution.hpp"
#include "hrpca/errors.hpp"
#include "hrpca/synthgen.hpp"
#include "hrpca/timeutil.hpp"
#include "test_util.hpp"

using namespace hrpca;
namespace ht = hrpca::testing;

namespace {

LevelModel rank2_model(std::mt19937_64& gen, std::size_t d = 6) {
    FitConfig cfg;
    cfg.rank_mode = FitConfig::RankMode::kFixed;
    cfg.fixed_rank = 2;
    return fit(ht::random_matrix(gen, 30, d), cfg, "level");
}

std::vector<double> mean_plus_modes(const LevelModel& model, double c1, double c2) {
    std::vector<double> row(model.col_means);
    for (std::size_t j = 0; j < model.n_features(); ++j) {
        row[j] += c1 * model.u(j, 0) + c2 * model.u(j, 1);
    }
    return row;
}

}  // namespace

TEST_CASE("projection scores read coordinates along the basis") {
    auto gen = ht::rng(401);
    const auto model = rank2_model(gen);

    const auto at_mean = projection_scores(model, model.col_means);
    for (double p : at_mean) CHECK(std::abs(p) < 1e-12);

    const auto one_mode = projection_scores(model, mean_plus_modes(model, 1.0, 0.0));
    CHECK(one_mode[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(one_mode[1]) < 1e-10);

    const auto both = projection_scores(model, mean_plus_modes(model, 2.0, 3.0));
    CHECK(both[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(both[1] == doctest::Approx(3.0).epsilon(1e-10));

    const std::vector<double> short_row(3, 0.0);
    CHECK_THROWS_AS(projection_scores(model, short_row), SchemaMismatch);
}

TEST_CASE("reference stats on a symmetric cloud center near zero") {
    auto gen = ht::rng(403);
    const auto train = ht::random_matrix(gen, 400, 5);
    FitConfig cfg;
    cfg.rank_mode = FitConfig::RankMode::kFixed;
    cfg.fixed_rank = 2;
    const auto model = fit(train, cfg);
    const auto stats = reference_stats(model, train);
    for (std::size_t k = 0; k < 2; ++k) {
        // Projections of centered training data have exactly zero mean up to
        // accumulation error; std sets the scale.
        CHECK(std::abs(stats.mean[k]) <
              3.0 * stats.stddev[k] / std::sqrt(400.0) + 1e-9);
        CHECK(stats.stddev[k] > 0.0);
    }
}

TEST_CASE("reference stats of a single row have zero spread") {
    auto gen = ht::rng(407);
    const auto model = rank2_model(gen);
    FeatureMatrix one;
    one.n_rows = 1;
    one.n_cols = model.n_features();
    one.col_names = model.feature_names;
    one.row_ids = {"r0"};
    one.values = mean_plus_modes(model, 1.5, -2.0);
    const auto stats = reference_stats(model, one);
    CHECK(stats.stddev == std::vector<double>{0.0, 0.0});
}

TEST_CASE("dominant mode picks the strongest standardized projection") {
    ProjectionStats stats{{0.0, 0.0}, {1.0, 1.0}};
    const auto dom = dominant_mode({10.0, 0.0}, stats, 3.0);
    REQUIRE(dom.has_value());
    CHECK(dom->mode == 0);
    CHECK(dom->z == doctest::Approx(10.0));

    CHECK_FALSE(dominant_mode({0.5, -0.9}, stats, 3.0).has_value());

    SUBCASE("zero spread turns any deviation into a sentinel") {
        ProjectionStats degenerate{{1.0, 0.0}, {0.0, 1.0}};
        const auto hit = dominant_mode({1.5, 0.0}, degenerate, 3.0);
        REQUIRE(hit.has_value());
        CHECK(hit->mode == 0);
        CHECK(std::isinf(hit->z));
        // exactly at the mean: z = 0, nothing dominates
        CHECK_FALSE(dominant_mode({1.0, 0.0}, degenerate, 3.0).has_value());
    }

    SUBCASE("ties resolve to the lowest mode index") {
        const auto tie = dominant_mode({4.0, -4.0}, stats, 3.0);
        REQUIRE(tie.has_value());
        CHECK(tie->mode == 0);
    }
}

TEST_CASE("top features rank by loading magnitude with index ties") {
    LevelModel model;
    model.level_name = "l";
    model.feature_names = {"a", "b", "c"};
    model.col_means = {0, 0, 0};
    model.rank = 1;
    model.basis_u = {0.9, 0.1, std::sqrt(1.0 - 0.81 - 0.01)};
    model.singular_values = {1.0};

    const auto top1 = top_features(model, 0, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1[0].first == "a");

    const auto all = top_features(model, 0, 3);
    CHECK(all.size() == 3);
    CHECK(all[0].second >= all[1].second);
    CHECK(all[1].second >= all[2].second);

    LevelModel tied = model;
    tied.basis_u = {0.6, -0.6, 0.529};
    const auto tie = top_features(tied, 0, 2);
    CHECK(tie[0].first == "a");  // equal |loading|, lower index first
    CHECK(tie[1].first == "b");

    CHECK_THROWS_AS(top_features(model, 1, 1), InvalidInput);
    CHECK_THROWS_AS(top_features(model, 0, 0), InvalidInput);
}

TEST_CASE("projection and reconstruction invert each other on the span") {
    auto gen = ht::rng(409);
    const auto model = rank2_model(gen);

    const auto mu = reconstruct_from_modes(model, {0.0, 0.0});
    CHECK(mu == model.col_means);

    const auto row = mean_plus_modes(model, 4.0, 0.0);
    const auto round_trip = reconstruct_from_modes(model, projection_scores(model, row));
    for (std::size_t j = 0; j < row.size(); ++j) {
        CHECK(round_trip[j] == doctest::Approx(row[j]).epsilon(1e-9));
    }
}

TEST_CASE("reconstruction drops exactly the orthogonal component") {
    auto gen = ht::rng(411);
    const auto model = rank2_model(gen);
    const std::size_t d = model.n_features();

    // Build an orthogonal offset by projecting a random vector off the basis.
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(d);
    for (double& x : v) x = dist(gen);
    for (std::size_t k = 0; k < model.rank; ++k) {
        double p = 0.0;
        for (std::size_t j = 0; j < d; ++j) p += v[j] * model.u(j, k);
        for (std::size_t j = 0; j < d; ++j) v[j] -= p * model.u(j, k);
    }

    auto row = mean_plus_modes(model, 2.0, -1.0);
    for (std::size_t j = 0; j < d; ++j) row[j] += v[j];
    const auto recon = reconstruct_from_modes(model, projection_scores(model, row));
    for (std::size_t j = 0; j < d; ++j) {
        CHECK(recon[j] == doctest::Approx(row[j] - v[j]).epsilon(1e-9));
    }
}

TEST_CASE("centered energy splits between projections and residual") {
    auto gen = ht::rng(413);
    const auto train = ht::random_matrix(gen, 40, 9);
    FitConfig cfg;
    cfg.rank_mode = FitConfig::RankMode::kFixed;
    cfg.fixed_rank = 3;
    const auto model = fit(train, cfg);

    const auto x = ht::random_matrix(gen, 50, 9);
    const auto scores = score(model, x);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        double centered_sq = 0.0;
        for (std::size_t j = 0; j < 9; ++j) {
            const double c = x.at(i, j) - model.col_means[j];
            centered_sq += c * c;
        }
        double proj_sq = 0.0;
        for (double p : projection_scores(model, x.row(i))) proj_sq += p * p;
        CHECK(centered_sq ==
              doctest::Approx(proj_sq + scores[i] * scores[i]).epsilon(1e-7));
    }
}

TEST_CASE("projection series tracks batch shifts mode by mode") {
    auto gen = ht::rng(417);
    const auto model = rank2_model(gen, 7);
    const std::size_t d = 7;

    FeatureMatrix batem;
    batem.n_rows = 4;
    batem.n_cols = d;
    batem.col_names = model.feature_names;
    batem.row_ids = default_row_ids("b", 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            batem.values.push_back(model.col_means[j]);
        }
    }

    SUBCASE("identical batches give a constant series") {
        const auto series =
            projection_series(model, {{100, batem}, {200, batem}, {300, batem}});
        REQUIRE(series.timestamps == std::vector<std::int64_t>{100, 200, 300});
        for (std::size_t k = 0; k < model.rank; ++k) {
            for (double v : series.mean_abs[k]) {
                CHECK(v == doctest::Approx(series.mean_abs[k][0]));
            }
        }
    }

    SUBCASE("a shifted batch spikes the matching mode") {
        FeatureMatrix shifted = batem;
        const double c = 8.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                shifted.at(i, j) += c * model.u(j, 0);
            }
        }
        const auto series = projection_series(model, {{100, batem}, {200, shifted}});
        CHECK(series.mean_abs[0][1] == doctest::Approx(c).epsilon(1e-9));
        CHECK(series.mean_abs[0][1] - series.mean_abs[0][0] ==
              doctest::Approx(c).epsilon(1e-7));
    }

    SUBCASE("empty batches are skipped with a warning") {
        FeatureMatrix empty;
        empty.n_cols = d;
        empty.col_names = model.feature_names;
        const auto series = projection_series(model, {{100, batem}, {200, empty}});
        CHECK(series.timestamps == std::vector<std::int64_t>{100});
        CHECK(series.warnings.size() == 1);
    }

    SUBCASE("no batches, no series") {
        const auto series = projection_series(model, {});
        CHECK(series.timestamps.empty());
    }

    SUBCASE("out-of-order batches are rejected") {
        CHECK_THROWS_AS(projection_series(model, {{200, batem}, {100, batem}}),
                        InvalidInput);
    }
}

TEST_CASE("annotation cites the latest change inside the window") {
    std::vector<AttributionRecord> records(1);
    records[0].row_id = "r0";
    records[0].dominant_mode = 2;
    records[0].top_features = {{"f3", 0.8}};

    SUBCASE("event within the window is cited") {
        const std::vector<ChangeLogEvent> events{{95, "deploy A"}, {200, "deploy B"}};
        annotate(records, {100}, events, 10);
        CHECK(records[0].annotation_tag == "mode 2 / feature f3; near change: deploy A");
    }

    SUBCASE("no events leaves the mode/feature tag alone") {
        annotate(records, {100}, {}, 10);
        CHECK(records[0].annotation_tag == "mode 2 / feature f3");
    }

    SUBCASE("the latest of several in-window events wins") {
        const std::vector<ChangeLogEvent> events{{92, "older"}, {97, "newer"}};
        annotate(records, {100}, events, 10);
        CHECK(records[0].annotation_tag == "mode 2 / feature f3; near change: newer");
    }

    SUBCASE("events after the anomaly are ignored") {
        const std::vector<ChangeLogEvent> events{{101, "later"}};
        annotate(records, {100}, events, 10);
        CHECK(records[0].annotation_tag == "mode 2 / feature f3");
    }

    SUBCASE("rows without a dominant mode tag as unattributed") {
        records[0].dominant_mode.reset();
        records[0].top_features.clear();
        annotate(records, {100}, {{95, "deploy A"}}, 10);
        CHECK(records[0].annotation_tag == "unattributed; near change: deploy A");
    }

    SUBCASE("unsorted events are rejected") {
        const std::vector<ChangeLogEvent> events{{97, "b"}, {92, "a"}};
        CHECK_THROWS_AS(annotate(records, {100}, events, 10), InvalidInput);
    }
}

TEST_CASE("attribute_rows fills dominant modes only above the z threshold") {
    auto gen = ht::rng(419);
    const auto train = ht::random_matrix(gen, 60, 6);
    FitConfig cfg;
    cfg.rank_mode = FitConfig::RankMode::kFixed;
    cfg.fixed_rank = 2;
    const auto model = fit(train, cfg);
    const auto stats = reference_stats(model, train);

    FeatureMatrix probe;
    probe.n_rows = 2;
    probe.n_cols = 6;
    probe.col_names = model.feature_names;
    probe.row_ids = {"calm", "loud"};
    // row 0: at the training mean; row 1: far along mode 1
    probe.values.assign(model.col_means.begin(), model.col_means.end());
    for (std::size_t j = 0; j < 6; ++j) {
        probe.values.push_back(model.col_means[j] +
                               50.0 * stats.stddev[1] * model.u(j, 1));
    }

    const auto records = attribute_rows(model, probe, stats, 3.0, 2);
    REQUIRE(records.size() == 2);
    CHECK_FALSE(records[0].dominant_mode.has_value());
    CHECK(records[0].top_features.empty());
    REQUIRE(records[1].dominant_mode.has_value());
    CHECK(*records[1].dominant_mode == 1);
    CHECK(records[1].top_features.size() == 2);
}

TEST_CASE("scaling a centered row preserves the argmax mode under equal stds") {
    auto gen = ht::rng(421);
    const auto model = rank2_model(gen);
    const ProjectionStats stats{{0.0, 0.0}, {1.0, 1.0}};

    const auto base = mean_plus_modes(model, 1.2, -3.4);
    for (double c : {2.0, 5.0, 40.0}) {
        std::vector<double> scaled(model.col_means);
        for (std::size_t j = 0; j < scaled.size(); ++j) {
            scaled[j] += c * (base[j] - model.col_means[j]);
        }
        const auto p0 = projection_scores(model, base);
        const auto p1 = projection_scores(model, scaled);
        for (std::size_t k = 0; k < p0.size(); ++k) {
            CHECK(p1[k] == doctest::Approx(c * p0[k]).epsilon(1e-9));
        }
        const auto d0 = dominant_mode(p0, stats, 0.5);
        const auto d1 = dominant_mode(p1, stats, 0.5);
        REQUIRE(d0.has_value());
        REQUIRE(d1.has_value());
        CHECK(d0->mode == d1->mode);
    }
}

TEST_CASE("attribution points into the injected feature subset") {
    // Flag with a clean-trained model; attribute with an eigenbasis fit on
    // the corrupted batch, standardized against clean reference stats.
    std::size_t hits = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GenConfig cfg;
        cfg.n_base_rows = 300;
        cfg.n_features = 10;
        cfg.affected_feature_fraction = 0.3;
        cfg.seed = seed;

        const auto train = generate_clean(cfg, cfg.seed);
        const auto injection = inject_anomalies(generate_clean(cfg, cfg.seed + 1), cfg);

        FitConfig audit_cfg;
        audit_cfg.rank_mode = FitConfig::RankMode::kFixed;
        audit_cfg.fixed_rank = 1;
        const auto audit_model = fit(train, audit_cfg);
        const auto flags =
            flag(score(audit_model, injection.corrupted), audit_model.threshold);

        FitConfig attr_cfg;
        attr_cfg.rank_mode = FitConfig::RankMode::kFixed;
        attr_cfg.fixed_rank = 1 + injection.affected_features.size();
        const auto attr_model = fit(injection.corrupted, attr_cfg);
        const auto stats = reference_stats(attr_model, train);

        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (!flags[i]) continue;
            const auto p = projection_scores(attr_model, injection.corrupted.row(i));
            const auto dom = dominant_mode(p, stats, 3.0);
            if (!dom) continue;
            const auto top = top_features(attr_model, dom->mode, 1);
            ++total;
            for (std::size_t f : injection.affected_features) {
                if (attr_model.feature_names[f] == top[0].first) {
                    ++hits;
                    break;
                }
            }
        }
    }
    REQUIRE(total > 0);
    CHECK(static_cast<double>(hits) >= 0.9 * static_cast<double>(total));
}
