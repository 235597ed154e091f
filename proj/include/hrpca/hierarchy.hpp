#ifndef HRPCA_HIERARCHY_HPP
#define HRPCA_HIERARCHY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hrpca/matrix.hpp"

namespace hrpca {

enum class AggOp { kMean, kSum };

// Ordered aggregation schema from the finest level to the coarsest.
// fan_out[i] children of levels[i] aggregate into one row of levels[i+1].
struct HierarchySpec {
    std::vector<std::string> levels;
    std::vector<std::size_t> fan_out;  // size levels.size() - 1
    AggOp agg_op = AggOp::kMean;

    void validate() const;  // throws InvalidConfig
};

// One level's data: the feature matrix, optional ground-truth anomaly
// labels, and (once rolled up) the child-row -> parent-row map.
struct LevelDataset {
    std::string level_name;
    FeatureMatrix matrix;
    std::optional<std::vector<bool>> labels;
    std::optional<std::vector<std::size_t>> parent_of;
};

// Aggregates contiguous blocks of fan_out child rows into one parent row
// (rows [p*f, (p+1)*f) belong to parent p), propagates labels when present,
// and records parent_of on the child. Throws ShapeError when the child row
// count is not divisible by fan_out.
LevelDataset rollup(LevelDataset& child, std::size_t fan_out, AggOp op,
                    const std::string& parent_name = "");

// Parent label = OR over its fan_out children's labels.
std::vector<bool> propagate_labels(const std::vector<bool>& child_labels,
                                   std::size_t fan_out);

// Rolls the base dataset up through every level of the spec. Element 0 is
// the base (with parent_of filled); element i is spec.levels[i].
std::vector<LevelDataset> build_level_chain(const LevelDataset& base,
                                            const HierarchySpec& spec);

}  // namespace hrpca

#endif  // HRPCA_HIERARCHY_HPP
