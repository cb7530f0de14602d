#include "minav/td3bc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "minav/error.hpp"

namespace minav {

namespace {

std::vector<std::size_t> layer_dims(std::size_t in, const std::vector<std::size_t>& hidden,
                                    std::size_t out) {
    std::vector<std::size_t> dims{in};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out);
    return dims;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::divergence, std::string(what) + " is not finite");
}

}  // namespace

void TrainConfig::validate() const {
    if (batch == 0) throw Error(ErrorCode::invalid_config, "train.batch must be positive");
    if (checkpoint_every == 0) throw Error(ErrorCode::invalid_config, "checkpoint_every must be positive");
    if (policy_delay == 0) throw Error(ErrorCode::invalid_config, "policy_delay must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCode::invalid_config, "gamma must be in [0, 1)");
    if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_config, "lambda must be >= 0");
    if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_config, "tau must be in (0, 1]");
    if (!(smoothing_sigma >= 0.0) || !(smoothing_clip >= 0.0)) {
        throw Error(ErrorCode::invalid_config, "smoothing noise parameters must be >= 0");
    }
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
        throw Error(ErrorCode::invalid_config, "learning rates must be positive");
    }
    for (auto h : hidden) {
        if (h == 0) throw Error(ErrorCode::invalid_config, "hidden widths must be positive");
    }
}

Mlp<float> make_actor(const NetShape& shape, const std::vector<std::size_t>& hidden) {
    return Mlp<float>(layer_dims(shape.actor_input(), hidden, shape.action_dims), OutputHead::tanh);
}

Mlp<float> make_critic(const NetShape& shape, const std::vector<std::size_t>& hidden) {
    return Mlp<float>(layer_dims(shape.critic_input(), hidden, 1), OutputHead::identity);
}

Td3BcNets make_td3bc_nets(const NetShape& shape, const TrainConfig& cfg, Rng& rng) {
    Td3BcNets nets;
    nets.shape = shape;
    nets.actor = make_actor(shape, cfg.hidden);
    nets.critic1 = make_critic(shape, cfg.hidden);
    nets.critic2 = make_critic(shape, cfg.hidden);
    nets.actor.init_uniform(rng);
    nets.critic1.init_uniform(rng);
    nets.critic2.init_uniform(rng);
    nets.actor_target = nets.actor;
    nets.critic1_target = nets.critic1;
    nets.critic2_target = nets.critic2;
    nets.actor_opt = AdamState<float>(nets.actor.param_count(), cfg.actor_lr);
    nets.critic1_opt = AdamState<float>(nets.critic1.param_count(), cfg.critic_lr);
    nets.critic2_opt = AdamState<float>(nets.critic2.param_count(), cfg.critic_lr);
    return nets;
}

void actor_inputs(const std::vector<float>& states, const std::vector<float>& goals,
                  const NetShape& shape, std::size_t rows, std::vector<float>& out) {
    const std::size_t in = shape.actor_input();
    out.resize(rows * in);
    for (std::size_t b = 0; b < rows; ++b) {
        float* dst = out.data() + b * in;
        std::copy_n(states.data() + b * shape.state_dim, shape.state_dim, dst);
        std::copy_n(goals.data() + b * shape.goal_dim, shape.goal_dim, dst + shape.state_dim);
    }
}

void critic_inputs(const std::vector<float>& states, const std::vector<float>& actions,
                   const std::vector<float>& goals, const NetShape& shape, std::size_t rows,
                   std::vector<float>& out) {
    const std::size_t in = shape.critic_input();
    out.resize(rows * in);
    for (std::size_t b = 0; b < rows; ++b) {
        float* dst = out.data() + b * in;
        std::copy_n(states.data() + b * shape.state_dim, shape.state_dim, dst);
        std::copy_n(actions.data() + b * shape.action_dims, shape.action_dims, dst + shape.state_dim);
        std::copy_n(goals.data() + b * shape.goal_dim, shape.goal_dim,
                    dst + shape.state_dim + shape.action_dims);
    }
}

std::vector<float> critic_targets(const RelabeledBatch& batch, const Td3BcNets& nets,
                                  const TrainConfig& cfg, Rng& noise_rng) {
    const auto& shape = nets.shape;
    const std::size_t rows = batch.size;
    std::vector<float> in;
    actor_inputs(batch.next_states, batch.goals, shape, rows, in);
    std::vector<float> next_actions = nets.actor_target.predict(in, rows);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& a : next_actions) {
        double eps = 0.0;
        if (cfg.smoothing_sigma > 0.0) {
            eps = std::clamp(cfg.smoothing_sigma * normal(noise_rng), -cfg.smoothing_clip,
                             cfg.smoothing_clip);
        }
        a = static_cast<float>(std::clamp(double(a) + eps, -1.0, 1.0));
    }
    critic_inputs(batch.next_states, next_actions, batch.goals, shape, rows, in);
    const auto q1 = nets.critic1_target.predict(in, rows);
    const auto q2 = nets.critic2_target.predict(in, rows);
    std::vector<float> y(rows);
    for (std::size_t b = 0; b < rows; ++b) {
        const double next = std::min(q1[b], q2[b]);
        y[b] = static_cast<float>(batch.rewards[b] + cfg.gamma * (1.0 - batch.dones[b]) * next);
    }
    return y;
}

CriticUpdate critic_update(const RelabeledBatch& batch, Td3BcNets& nets, const TrainConfig& cfg,
                           Rng& noise_rng) {
    CriticUpdate result;
    result.targets = critic_targets(batch, nets, cfg, noise_rng);
    const std::size_t rows = batch.size;
    std::vector<float> in;
    critic_inputs(batch.states, batch.actions, batch.goals, nets.shape, rows, in);

    auto fit = [&](Mlp<float>& critic, AdamState<float>& opt) {
        ForwardCache<float> cache;
        critic.forward(in, rows, cache);
        const auto q = cache.output();
        std::vector<float> dq(rows);
        double loss = 0.0;
        for (std::size_t b = 0; b < rows; ++b) {
            const double err = double(q[b]) - double(result.targets[b]);
            loss += err * err;
            dq[b] = static_cast<float>(2.0 * err / double(rows));
        }
        loss /= double(rows);
        check_finite(loss, "critic loss");
        std::vector<float> grads(critic.param_count());
        critic.backward(cache, dq, grads, {});
        adam_step(critic, std::span<const float>(grads), opt);
        return loss;
    };
    result.loss1 = fit(nets.critic1, nets.critic1_opt);
    result.loss2 = fit(nets.critic2, nets.critic2_opt);
    return result;
}

ActorUpdate actor_loss_and_grad(const RelabeledBatch& batch, const Td3BcNets& nets,
                                const TrainConfig& cfg, std::vector<float>& grads) {
    const auto& shape = nets.shape;
    const std::size_t rows = batch.size;
    const std::size_t adim = shape.action_dims;
    std::vector<float> ain;
    actor_inputs(batch.states, batch.goals, shape, rows, ain);
    ForwardCache<float> actor_cache;
    nets.actor.forward(ain, rows, actor_cache);
    const std::vector<float> a_hat(actor_cache.output().begin(), actor_cache.output().end());

    std::vector<float> cin;
    critic_inputs(batch.states, a_hat, batch.goals, shape, rows, cin);
    ForwardCache<float> critic_cache;
    nets.critic1.forward(cin, rows, critic_cache);
    const auto q = critic_cache.output();

    ActorUpdate out;
    for (std::size_t b = 0; b < rows; ++b) out.q_term += q[b];
    out.q_term /= double(rows);
    for (std::size_t i = 0; i < rows * adim; ++i) {
        const double d = double(a_hat[i]) - double(batch.actions[i]);
        out.bc_term += d * d;
    }
    out.bc_term /= double(rows);
    out.loss = -out.q_term + cfg.lambda * out.bc_term;
    check_finite(out.loss, "actor loss");

    // dL/dQ = -1/B; pull it back to the action slice of the critic input.
    std::vector<float> dq(rows, static_cast<float>(-1.0 / double(rows)));
    std::vector<float> d_cin(rows * shape.critic_input());
    nets.critic1.backward(critic_cache, dq, {}, d_cin);
    std::vector<float> d_action(rows * adim);
    for (std::size_t b = 0; b < rows; ++b) {
        for (std::size_t j = 0; j < adim; ++j) {
            const std::size_t i = b * adim + j;
            const double bc = 2.0 * cfg.lambda * (double(a_hat[i]) - double(batch.actions[i])) / double(rows);
            d_action[i] = static_cast<float>(d_cin[b * shape.critic_input() + shape.state_dim + j] + bc);
        }
    }
    grads.resize(nets.actor.param_count());
    nets.actor.backward(actor_cache, d_action, grads, {});
    return out;
}

ActorUpdate actor_update(const RelabeledBatch& batch, Td3BcNets& nets, const TrainConfig& cfg) {
    std::vector<float> grads;
    const auto out = actor_loss_and_grad(batch, nets, cfg, grads);
    adam_step(nets.actor, std::span<const float>(grads), nets.actor_opt);
    return out;
}

void update_targets(Td3BcNets& nets, double tau) {
    polyak_update(nets.actor_target, nets.actor, tau);
    polyak_update(nets.critic1_target, nets.critic1, tau);
    polyak_update(nets.critic2_target, nets.critic2, tau);
}

std::vector<Checkpoint> train_td3bc(const BatchSampler& sampler, const TrainConfig& cfg,
                                    std::uint64_t fingerprint, const TrainHooks& hooks) {
    cfg.validate();
    const auto& ds = sampler.dataset();
    const NetShape shape{kStackFrames * ds.dim(), ds.dim(), ds.action_dims()};
    Rng init_rng(derive_seed(cfg.seed, "train.init"));
    Rng batch_rng(derive_seed(cfg.seed, "train.batches"));
    Rng noise_rng(derive_seed(cfg.seed, "train.smoothing"));
    Td3BcNets nets = make_td3bc_nets(shape, cfg, init_rng);

    std::vector<Checkpoint> checkpoints;
    auto emit = [&](std::size_t step) {
        if (!nets.actor.all_finite()) {
            throw Error(ErrorCode::divergence, "actor parameters not finite at step " + std::to_string(step));
        }
        Checkpoint c;
        c.actor = nets.actor;
        c.step = step;
        c.fingerprint = fingerprint;
        checkpoints.push_back(c);
        if (hooks.on_checkpoint) hooks.on_checkpoint(checkpoints.back());
    };
    emit(0);

    RelabeledBatch critic_batch, actor_batch;
    double last_actor_loss = 0.0;
    for (std::size_t step = 1; step <= cfg.gradient_steps; ++step) {
        sampler.sample_into(BatchMode::critic, cfg.batch, batch_rng, critic_batch);
        const auto c = critic_update(critic_batch, nets, cfg, noise_rng);
        if (step % cfg.policy_delay == 0) {
            sampler.sample_into(BatchMode::actor, cfg.batch, batch_rng, actor_batch);
            last_actor_loss = actor_update(actor_batch, nets, cfg).loss;
            update_targets(nets, cfg.tau);
        }
        if (hooks.on_log && hooks.log_every > 0 && step % hooks.log_every == 0) {
            hooks.on_log(step, 0.5 * (c.loss1 + c.loss2), last_actor_loss);
        }
        if (step % cfg.checkpoint_every == 0) emit(step);
    }
    return checkpoints;
}

}  // namespace minav
