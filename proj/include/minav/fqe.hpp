#pragma once

// Fitted Q-evaluation of a frozen policy, checkpoint ranking, and the
// Spearman rank correlation used to validate the ranking.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "minav/checkpoint.hpp"
#include "minav/relabel.hpp"
#include "minav/td3bc.hpp"

namespace minav {

struct FqeConfig {
    std::size_t iterations = 5000;
    std::size_t batch = 256;
    double gamma = 0.97;
    std::size_t target_sync = 100;  // hard copy omega' <- omega every this many iterations
    std::size_t score_samples = 2048;
    std::vector<std::size_t> hidden{256, 256};
    double lr = 3e-4;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Fills `out` with a batch of the requested size. Only states, actions,
/// next_states, goals, rewards and dones are read.
using BatchSource = std::function<void(Rng& rng, std::size_t batch, RelabeledBatch& out)>;

/// Maps `rows` (state, goal) pairs to actions (rows x action_dims).
using BatchPolicy = std::function<void(std::span<const float> states, std::span<const float> goals,
                                       std::size_t rows, std::vector<float>& actions)>;

BatchPolicy actor_policy(const Mlp<float>& actor, const NetShape& shape);

/// Uniform-goal batches from the dataset (the actor-mode sampler).
BatchSource uniform_goal_source(const BatchSampler& sampler);

/// Regresses a fresh Q-network to r + gamma (1 - d) Q'(s', pi(s', g), g).
/// Throws divergence on a non-finite loss.
Mlp<float> fqe_train(const BatchPolicy& policy, const BatchSource& source, const NetShape& shape,
                     const FqeConfig& cfg);

/// y for each row of `batch`. Reads next_states, goals, rewards and dones only.
std::vector<float> fqe_targets(const RelabeledBatch& batch, const Mlp<float>& q_target,
                               const BatchPolicy& policy, const NetShape& shape, double gamma);

/// Mean of Q(s, pi(s, g), g) over the given rows.
double fqe_score(const Mlp<float>& qnet, const BatchPolicy& policy, std::span<const float> states,
                 std::span<const float> goals, std::size_t rows, const NetShape& shape);

struct ScoreInputs {
    std::size_t rows = 0;
    std::vector<float> states;
    std::vector<float> goals;
};

/// n states uniform over the dataset paired with goals uniform over the goal set.
ScoreInputs sample_score_inputs(const BatchSampler& sampler, std::size_t n, Rng& rng);

/// Trains FQE for one checkpoint and scores it; the result is stored in
/// `ckpt.fqe_score` and returned.
double evaluate_checkpoint(Checkpoint& ckpt, const BatchSampler& sampler, const FqeConfig& cfg);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Highest fqe_score; ties go to the later step.
const Checkpoint& select_best(const std::vector<Checkpoint>& checkpoints);

}  // namespace minav
