#pragma once

// Hindsight goal relabeling and the sparse similarity reward.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minav/dataset.hpp"
#include "minav/goal_set.hpp"
#include "minav/rng.hpp"

namespace minav {

struct RelabelConfig {
    double p = 0.95;            // geometric offset parameter, P(K=k) = p^(k-1) (1-p)
    double w_geom = 0.5;        // critic mixture weight of geometric-future goals
    double delta_done = 0.8;
    double gamma = 0.97;
    bool reward_on_next = false;          // score s_{t+1} instead of s_t
    bool strict_normalization = false;    // reject non-unit inputs instead of renormalising

    double w_unif() const { return 1.0 - w_geom; }
    void validate() const;
};

enum class BatchMode { critic, actor };

enum class GoalSource : std::uint8_t { geometric = 0, uniform = 1 };

struct RelabeledBatch {
    std::size_t size = 0;
    std::size_t dim = 0;
    std::size_t action_dims = 0;
    std::vector<float> states;       // size x 4*dim
    std::vector<float> actions;      // size x action_dims
    std::vector<float> next_states;  // size x 4*dim
    std::vector<float> goals;        // size x dim
    std::vector<float> rewards;      // size
    std::vector<float> dones;        // size
    std::vector<GoalSource> sources;
    std::vector<StepRef> transitions;
    std::vector<StepRef> goal_refs;

    std::size_t state_dim() const { return kStackFrames * dim; }
};

/// Mean cosine similarity of the four stacked frames to the goal.
double similarity(std::span<const float> stacked, std::span<const float> goal, bool strict = false);

struct RewardDone {
    int reward = 0;
    int done = 0;
};

/// reward = done = 1 iff s >= delta_done.
RewardDone reward(double s, double delta_done);

/// min(t + k, last) with k ~ Geometric(p) on {1, 2, ...}.
std::size_t sample_geometric_goal(std::size_t t, std::size_t last, double p, Rng& rng);

/// Uniform sampler over transitions (steps with a successor).
class TransitionIndex {
public:
    explicit TransitionIndex(const OfflineDataset& dataset);
    std::size_t size() const { return total_; }
    StepRef sample(Rng& rng) const;
    StepRef at(std::size_t flat) const;

private:
    std::vector<std::size_t> prefix_;  // prefix_[e] = transitions before episode e
    std::size_t total_ = 0;
};

class BatchSampler {
public:
    BatchSampler(const OfflineDataset& dataset, const GoalSet& goals, RelabelConfig cfg);

    RelabeledBatch sample(BatchMode mode, std::size_t batch, Rng& rng) const;
    void sample_into(BatchMode mode, std::size_t batch, Rng& rng, RelabeledBatch& out) const;

    const OfflineDataset& dataset() const { return dataset_; }
    const GoalSet& goals() const { return goals_; }
    const RelabelConfig& config() const { return cfg_; }
    StepRef sample_uniform_goal(Rng& rng) const;
    StepRef sample_state(Rng& rng) const { return index_.sample(rng); }

private:
    const OfflineDataset& dataset_;
    const GoalSet& goals_;
    RelabelConfig cfg_;
    TransitionIndex index_;
};

}  // namespace minav
