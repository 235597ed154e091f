#include "hrpca/model_store.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace {

using nlohmann::json;

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check_model_finite(const LevelModel& m) {
    auto ok = [](double v) { return std::isfinite(v); };
    bool fine = ok(m.threshold) && ok(m.train_residual_mean) && ok(m.train_residual_std);
    for (double v : m.col_means) fine = fine && ok(v);
    for (double v : m.basis_u) fine = fine && ok(v);
    for (double v : m.singular_values) fine = fine && ok(v);
    if (!fine) {
        throw InvalidInput("model '" + m.level_name + "' contains non-finite values");
    }
}

// Canonical JSON object for one model, content_hash excluded. nlohmann
// stores object keys sorted and prints doubles as shortest round-trip
// decimals, which is exactly the canonical form the file format promises.
json model_to_json(const LevelModel& m) {
    json j;
    j["level_name"] = m.level_name;
    j["feature_names"] = m.feature_names;
    j["col_means"] = m.col_means;
    j["basis_u"] = m.basis_u;
    j["singular_values"] = m.singular_values;
    j["rank"] = m.rank;
    j["threshold"] = m.threshold;
    j["train_residual_mean"] = m.train_residual_mean;
    j["train_residual_std"] = m.train_residual_std;
    j["version"] = m.version;
    return j;
}

LevelModel model_from_json(const json& j) {
    LevelModel m;
    m.level_name = j.at("level_name").get<std::string>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.col_means = j.at("col_means").get<std::vector<double>>();
    m.basis_u = j.at("basis_u").get<std::vector<double>>();
    m.singular_values = j.at("singular_values").get<std::vector<double>>();
    m.rank = j.at("rank").get<std::size_t>();
    m.threshold = j.at("threshold").get<double>();
    m.train_residual_mean = j.at("train_residual_mean").get<double>();
    m.train_residual_std = j.at("train_residual_std").get<double>();
    m.version = j.at("version").get<std::string>();
    m.content_hash = j.at("content_hash").get<std::string>();

    const std::size_t d = m.feature_names.size();
    if (m.col_means.size() != d || m.singular_values.size() != m.rank ||
        m.basis_u.size() != d * m.rank) {
        throw ParseError("model '" + m.level_name + "' has inconsistent field sizes");
    }
    return m;
}

}  // namespace

std::string model_content_hash(const LevelModel& model) {
    return fnv1a64_hex(model_to_json(model).dump());
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
    for (const LevelModel& m : bundle.models) check_model_finite(m);

    json doc;
    doc["format_version"] = bundle.format_version;
    doc["created_at"] = bundle.created_at;
    doc["fingerprint"] = bundle.fingerprint;
    doc["models"] = json::array();
    for (const LevelModel& m : bundle.models) {
        json jm = model_to_json(m);
        jm["content_hash"] = model_content_hash(m);
        doc["models"].push_back(std::move(jm));
    }

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw StorageError("cannot open bundle file for writing", tmp.string());
        }
        out << doc.dump(2) << '\n';
        if (!out.flush()) {
            throw StorageError("write failed", tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw StorageError("cannot move bundle into place", path.string());
    }
}

ModelBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open bundle file", path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();

    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bundle is not valid JSON: ") + e.what());
    }

    ModelBundle bundle;
    try {
        bundle.format_version = doc.at("format_version").get<int>();
        if (bundle.format_version != 1) {
            throw VersionError("unsupported bundle format_version " +
                               std::to_string(bundle.format_version));
        }
        bundle.created_at = doc.at("created_at").get<std::string>();
        bundle.fingerprint = doc.at("fingerprint").get<std::string>();
        for (const json& jm : doc.at("models")) {
            LevelModel m = model_from_json(jm);
            if (model_content_hash(m) != m.content_hash) {
                throw IntegrityError("content hash mismatch for level '" +
                                     m.level_name + "'");
            }
            bundle.models.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bundle document malformed: ") + e.what());
    }
    return bundle;
}

}  // namespace hrpca
