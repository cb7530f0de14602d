#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "minav/dataset.hpp"

namespace minav {

struct StepRef {
    std::uint32_t episode = 0;
    std::uint32_t step = 0;
    auto operator<=>(const StepRef&) const = default;
};

/// Observations whose SSD strictly exceeds `threshold`, sorted, unique.
struct GoalSet {
    std::vector<StepRef> indices;
    double threshold = 0.0;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

/// Throws empty-dataset on an empty dataset and empty-goal-set when no
/// observation passes the filter.
GoalSet build_goal_set(const OfflineDataset& dataset, double delta_ssd);

/// Text form: `# threshold=<v>` then `episode,step` per line.
void write_goal_set(std::ostream& os, const GoalSet& goals);
GoalSet read_goal_set(std::istream& is);
void save_goal_set(const GoalSet& goals, const std::string& path);
GoalSet load_goal_set(const std::string& path);

}  // namespace minav
