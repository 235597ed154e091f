#include "hrpca/hierarchy.hpp"

#include <unordered_set>

#include "hrpca/errors.hpp"

namespace hrpca {

void HierarchySpec::validate() const {
    if (levels.size() < 2) {
        throw InvalidConfig("a hierarchy needs at least 2 levels");
    }
    if (fan_out.size() != levels.size() - 1) {
        throw InvalidConfig("fan_out must have one entry per adjacent level pair");
    }
    for (std::size_t f : fan_out) {
        if (f < 1) throw InvalidConfig("fan_out entries must be >= 1");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : levels) {
        if (!seen.insert(name).second) {
            throw InvalidConfig("duplicate level name: " + name);
        }
    }
}

LevelDataset rollup(LevelDataset& child, std::size_t fan_out, AggOp op,
                    const std::string& parent_name) {
    if (fan_out < 1) {
        throw InvalidConfig("fan_out must be >= 1");
    }
    const std::size_t n = child.matrix.n_rows, d = child.matrix.n_cols;
    if (n % fan_out != 0) {
        throw ShapeError("row count " + std::to_string(n) +
                         " not divisible by fan_out " + std::to_string(fan_out));
    }
    const std::size_t n_parents = n / fan_out;
    const std::string name =
        parent_name.empty() ? child.level_name + "_rollup" : parent_name;

    LevelDataset parent;
    parent.level_name = name;
    parent.matrix.n_rows = n_parents;
    parent.matrix.n_cols = d;
    parent.matrix.values.assign(n_parents * d, 0.0);
    parent.matrix.col_names = child.matrix.col_names;
    parent.matrix.row_ids = default_row_ids(name, n_parents);

    for (std::size_t p = 0; p < n_parents; ++p) {
        for (std::size_t c = 0; c < fan_out; ++c) {
            const std::size_t row = p * fan_out + c;
            for (std::size_t j = 0; j < d; ++j) {
                parent.matrix.at(p, j) += child.matrix.at(row, j);
            }
        }
        if (op == AggOp::kMean) {
            for (std::size_t j = 0; j < d; ++j) {
                parent.matrix.at(p, j) /= static_cast<double>(fan_out);
            }
        }
    }

    if (child.labels) {
        parent.labels = propagate_labels(*child.labels, fan_out);
    }
    std::vector<std::size_t> parent_of(n);
    for (std::size_t i = 0; i < n; ++i) parent_of[i] = i / fan_out;
    child.parent_of = std::move(parent_of);
    return parent;
}

std::vector<bool> propagate_labels(const std::vector<bool>& child_labels,
                                   std::size_t fan_out) {
    if (fan_out < 1) {
        throw InvalidConfig("fan_out must be >= 1");
    }
    if (child_labels.size() % fan_out != 0) {
        throw ShapeError("label count " + std::to_string(child_labels.size()) +
                         " not divisible by fan_out " + std::to_string(fan_out));
    }
    const std::size_t n_parents = child_labels.size() / fan_out;
    std::vector<bool> parent(n_parents, false);
    for (std::size_t p = 0; p < n_parents; ++p) {
        for (std::size_t c = 0; c < fan_out; ++c) {
            if (child_labels[p * fan_out + c]) {
                parent[p] = true;
                break;
            }
        }
    }
    return parent;
}

std::vector<LevelDataset> build_level_chain(const LevelDataset& base,
                                            const HierarchySpec& spec) {
    spec.validate();
    if (base.level_name != spec.levels[0]) {
        throw InvalidConfig("base dataset is level '" + base.level_name +
                            "', spec starts at '" + spec.levels[0] + "'");
    }
    std::size_t product = 1;
    for (std::size_t f : spec.fan_out) product *= f;
    if (base.matrix.n_rows % product != 0) {
        throw ShapeError("base row count " + std::to_string(base.matrix.n_rows) +
                         " not divisible by the fan-out product " +
                         std::to_string(product));
    }

    std::vector<LevelDataset> chain;
    chain.reserve(spec.levels.size());
    chain.push_back(base);
    for (std::size_t i = 0; i + 1 < spec.levels.size(); ++i) {
        chain.push_back(
            rollup(chain.back(), spec.fan_out[i], spec.agg_op, spec.levels[i + 1]));
    }
    return chain;
}

}  // namespace hrpca
