#pragma once

// Goal-conditioned TD3+BC: twin critics regressed to a clipped double-Q target
// with target-policy smoothing, and a delayed actor ascending
// Q1(s, pi(s, g), g) - lambda * |pi(s, g) - a|^2 with a fixed lambda.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "minav/checkpoint.hpp"
#include "minav/mlp.hpp"
#include "minav/relabel.hpp"

namespace minav {

struct TrainConfig {
    std::size_t gradient_steps = 20000;
    std::size_t batch = 256;
    double gamma = 0.97;
    double lambda = 0.001;
    double tau = 0.005;
    std::size_t policy_delay = 2;
    double smoothing_sigma = 0.2;  // fraction of the action range half-width
    double smoothing_clip = 0.5;
    std::size_t checkpoint_every = 1000;
    std::vector<std::size_t> hidden{256, 256};
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    std::uint64_t seed = 0;

    void validate() const;
};

struct NetShape {
    std::size_t state_dim = 0;   // 4 * embedding dim
    std::size_t goal_dim = 0;    // embedding dim
    std::size_t action_dims = 0;

    std::size_t actor_input() const { return state_dim + goal_dim; }
    std::size_t critic_input() const { return state_dim + action_dims + goal_dim; }
};

struct Td3BcNets {
    NetShape shape;
    Mlp<float> actor, actor_target;
    Mlp<float> critic1, critic2, critic1_target, critic2_target;
    AdamState<float> actor_opt, critic1_opt, critic2_opt;
};

Mlp<float> make_actor(const NetShape& shape, const std::vector<std::size_t>& hidden);
Mlp<float> make_critic(const NetShape& shape, const std::vector<std::size_t>& hidden);

/// Online nets initialised from `rng`; targets start as exact copies.
Td3BcNets make_td3bc_nets(const NetShape& shape, const TrainConfig& cfg, Rng& rng);

/// [state, goal] rows for the actor.
void actor_inputs(const std::vector<float>& states, const std::vector<float>& goals,
                  const NetShape& shape, std::size_t rows, std::vector<float>& out);
/// [state, action, goal] rows for a critic.
void critic_inputs(const std::vector<float>& states, const std::vector<float>& actions,
                   const std::vector<float>& goals, const NetShape& shape, std::size_t rows,
                   std::vector<float>& out);

/// y = r + gamma * (1 - d) * min_j Q'_j(s', clip(pi'(s', g) + eps), g).
std::vector<float> critic_targets(const RelabeledBatch& batch, const Td3BcNets& nets,
                                  const TrainConfig& cfg, Rng& noise_rng);

struct CriticUpdate {
    double loss1 = 0.0;
    double loss2 = 0.0;
    std::vector<float> targets;
};

/// One Adam step on each critic. Throws divergence on a non-finite loss.
CriticUpdate critic_update(const RelabeledBatch& batch, Td3BcNets& nets, const TrainConfig& cfg,
                           Rng& noise_rng);

struct ActorUpdate {
    double loss = 0.0;     // -mean Q1 + lambda * mean |a_hat - a|^2
    double q_term = 0.0;   // mean Q1(s, a_hat, g)
    double bc_term = 0.0;  // mean |a_hat - a|^2
};

/// Loss and actor-parameter gradient without stepping the optimiser.
ActorUpdate actor_loss_and_grad(const RelabeledBatch& batch, const Td3BcNets& nets,
                                const TrainConfig& cfg, std::vector<float>& grads);

/// One Adam step on the actor. Throws divergence on a non-finite loss.
ActorUpdate actor_update(const RelabeledBatch& batch, Td3BcNets& nets, const TrainConfig& cfg);

void update_targets(Td3BcNets& nets, double tau);

struct TrainHooks {
    /// Called with each emitted checkpoint, in step order.
    std::function<void(const Checkpoint&)> on_checkpoint;
    /// Called every `log_every` gradient steps.
    std::function<void(std::size_t step, double critic_loss, double actor_loss)> on_log;
    std::size_t log_every = 1000;
};

/// Runs `gradient_steps` updates and returns checkpoints at steps 0, c, 2c, ...
/// Deterministic given `cfg.seed`.
std::vector<Checkpoint> train_td3bc(const BatchSampler& sampler, const TrainConfig& cfg,
                                    std::uint64_t fingerprint, const TrainHooks& hooks = {});

}  // namespace minav
