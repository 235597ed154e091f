#ifndef HRPCA_MODEL_STORE_HPP
#define HRPCA_MODEL_STORE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "hrpca/model.hpp"

namespace hrpca {

// Versioned single-file persistence for the per-level models of one fitted
// hierarchy. The on-disk form is canonical UTF-8 JSON: keys sorted,
// reals rendered as shortest round-trip decimals, newline-terminated.
struct ModelBundle {
    int format_version = 1;
    std::string created_at;   // ISO-8601 UTC instant
    std::string fingerprint;  // descriptor of the data/config used for training
    std::vector<LevelModel> models;
};

// FNV-1a 64-bit hex digest of the model's canonical serialization (the
// content_hash field itself excluded).
std::string model_content_hash(const LevelModel& model);

// Writes the bundle atomically (temp file + rename), recomputing every
// model's content hash. Throws StorageError on I/O failure.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);

// Loads and verifies a bundle. Throws StorageError for a missing file,
// ParseError for a malformed document, VersionError for an unsupported
// format_version, IntegrityError when a stored hash does not match the
// recomputed one.
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace hrpca

#endif  // HRPCA_MODEL_STORE_HPP
