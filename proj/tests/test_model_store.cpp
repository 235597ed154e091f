#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hrpca/errors.hpp"
#include "hrpca/model_store.hpp"
#include "test_util.hpp"

using namespace hrpca;
namespace ht = hrpca::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hrpca_store_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static std::size_t counter() {
        static std::size_t c = 0;
        return c++;
    }
};

ModelBundle sample_bundle(std::uint64_t seed, std::size_t levels = 2) {
    auto gen = ht::rng(seed);
    FitConfig cfg;
    cfg.rank_mode = FitConfig::RankMode::kFixed;
    cfg.fixed_rank = 2;
    ModelBundle bundle;
    bundle.created_at = "2026-01-05T00:00:00Z";
    bundle.fingerprint = "test fixture";
    for (std::size_t i = 0; i < levels; ++i) {
        bundle.models.push_back(
            fit(ht::random_matrix(gen, 25, 6), cfg, "level" + std::to_string(i)));
    }
    return bundle;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("canonical serialization is a fixed point of save/load") {
    TempDir dir;
    const auto bundle = sample_bundle(501);
    const fs::path first = dir.path / "bundle.json";
    const fs::path second = dir.path / "bundle2.json";
    save_bundle(bundle, first);
    const auto loaded = load_bundle(first);
    save_bundle(loaded, second);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(first).back() == '\n');
}

TEST_CASE("round trip preserves scores exactly") {
    TempDir dir;
    auto gen = ht::rng(503);
    const auto bundle = sample_bundle(503);
    const fs::path path = dir.path / "bundle.json";
    save_bundle(bundle, path);
    const auto loaded = load_bundle(path);
    REQUIRE(loaded.models.size() == bundle.models.size());

    FeatureMatrix probe = ht::random_matrix(gen, 15, 6);
    probe.col_names = bundle.models[0].feature_names;
    const auto before = score(bundle.models[0], probe);
    const auto after = score(loaded.models[0], probe);
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(std::abs(before[i] - after[i]) <= 1e-12);
        CHECK(before[i] == after[i]);  // shortest round-trip decimals are exact
    }
    CHECK(flag(before, bundle.models[0].threshold) ==
          flag(after, loaded.models[0].threshold));
}

TEST_CASE("tampering with a stored value is detected") {
    TempDir dir;
    const fs::path path = dir.path / "bundle.json";
    save_bundle(sample_bundle(507), path);

    std::string text = slurp(path);
    const auto pos = text.find("\"singular_values\": [");
    REQUIRE(pos != std::string::npos);
    const auto digit = text.find_first_of("0123456789", pos + 20);
    REQUIRE(digit != std::string::npos);
    text[digit] = text[digit] == '9' ? '8' : '9';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;

    CHECK_THROWS_AS(load_bundle(path), IntegrityError);
}

TEST_CASE("the hash tracks every model field") {
    const auto bundle = sample_bundle(509);
    const std::string base = model_content_hash(bundle.models[0]);

    auto m = bundle.models[0];
    m.threshold += 1e-9;
    CHECK(model_content_hash(m) != base);

    m = bundle.models[0];
    m.level_name = "renamed";
    CHECK(model_content_hash(m) != base);

    m = bundle.models[0];
    m.basis_u[3] = -m.basis_u[3];
    CHECK(model_content_hash(m) != base);

    m = bundle.models[0];
    CHECK(model_content_hash(m) == base);
}

TEST_CASE("unsupported format versions are refused") {
    TempDir dir;
    const fs::path path = dir.path / "bundle.json";
    save_bundle(sample_bundle(511), path);
    std::string text = slurp(path);
    const auto pos = text.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 19, "\"format_version\": 2");
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
    CHECK_THROWS_AS(load_bundle(path), VersionError);
}

TEST_CASE("truncated and malformed documents raise ParseError") {
    TempDir dir;
    const fs::path path = dir.path / "bundle.json";
    save_bundle(sample_bundle(513), path);
    std::string text = slurp(path);
    std::ofstream(path, std::ios::binary | std::ios::trunc)
        << text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(load_bundle(path), ParseError);

    std::ofstream(path, std::ios::binary | std::ios::trunc) << "{\"format_version\": 1}";
    CHECK_THROWS_AS(load_bundle(path), ParseError);
}

TEST_CASE("missing and unwritable paths raise StorageError") {
    TempDir dir;
    CHECK_THROWS_AS(load_bundle(dir.path / "nope.json"), StorageError);
    CHECK_THROWS_AS(save_bundle(sample_bundle(517), dir.path / "no_dir" / "x.json"),
                    StorageError);
}

TEST_CASE("random fitted models survive the round trip") {
    TempDir dir;
    auto gen = ht::rng(519);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 10 + static_cast<std::size_t>(gen() % 30);
        const std::size_t d = 2 + static_cast<std::size_t>(gen() % 8);
        FitConfig cfg;
        cfg.rank_mode = FitConfig::RankMode::kExplainedVariance;
        cfg.variance_cutoff = 0.9;
        ModelBundle bundle;
        bundle.created_at = "2026-01-05T00:00:00Z";
        bundle.fingerprint = "prop";
        const auto train = ht::random_matrix(gen, n, d);
        bundle.models.push_back(fit(train, cfg, "lvl"));

        const fs::path path = dir.path / ("b" + std::to_string(trial) + ".json");
        save_bundle(bundle, path);
        const auto loaded = load_bundle(path);

        const auto before = score(bundle.models[0], train);
        const auto after = score(loaded.models[0], train);
        CHECK(before == after);
    }
}
