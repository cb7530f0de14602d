#include "minav/fqe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "minav/error.hpp"

namespace minav {

void FqeConfig::validate() const {
    if (iterations == 0 || batch == 0 || target_sync == 0 || score_samples == 0) {
        throw Error(ErrorCode::invalid_config, "fqe sizes must be positive");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCode::invalid_config, "fqe gamma must be in [0, 1)");
    if (!(lr > 0.0)) throw Error(ErrorCode::invalid_config, "fqe lr must be positive");
    for (auto h : hidden) {
        if (h == 0) throw Error(ErrorCode::invalid_config, "fqe hidden widths must be positive");
    }
}

BatchPolicy actor_policy(const Mlp<float>& actor, const NetShape& shape) {
    return [&actor, shape](std::span<const float> states, std::span<const float> goals, std::size_t rows,
                           std::vector<float>& actions) {
        const std::size_t in = shape.actor_input();
        std::vector<float> x(rows * in);
        for (std::size_t b = 0; b < rows; ++b) {
            std::copy_n(states.data() + b * shape.state_dim, shape.state_dim, x.data() + b * in);
            std::copy_n(goals.data() + b * shape.goal_dim, shape.goal_dim,
                        x.data() + b * in + shape.state_dim);
        }
        actions = actor.predict(x, rows);
    };
}

BatchSource uniform_goal_source(const BatchSampler& sampler) {
    return [&sampler](Rng& rng, std::size_t batch, RelabeledBatch& out) {
        sampler.sample_into(BatchMode::actor, batch, rng, out);
    };
}

std::vector<float> fqe_targets(const RelabeledBatch& batch, const Mlp<float>& q_target,
                               const BatchPolicy& policy, const NetShape& shape, double gamma) {
    const std::size_t rows = batch.size;
    std::vector<float> next_actions;
    policy(batch.next_states, batch.goals, rows, next_actions);
    std::vector<float> in;
    critic_inputs(batch.next_states, next_actions, batch.goals, shape, rows, in);
    const auto q = q_target.predict(in, rows);
    std::vector<float> y(rows);
    for (std::size_t b = 0; b < rows; ++b) {
        y[b] = static_cast<float>(batch.rewards[b] + gamma * (1.0 - batch.dones[b]) * q[b]);
    }
    return y;
}

Mlp<float> fqe_train(const BatchPolicy& policy, const BatchSource& source, const NetShape& shape,
                     const FqeConfig& cfg) {
    cfg.validate();
    Rng init_rng(derive_seed(cfg.seed, "fqe.init"));
    Rng batch_rng(derive_seed(cfg.seed, "fqe.batches"));
    Mlp<float> q = make_critic(shape, cfg.hidden);
    q.init_uniform(init_rng);
    Mlp<float> q_target = q;
    AdamState<float> opt(q.param_count(), cfg.lr);

    RelabeledBatch batch;
    std::vector<float> in, grads(q.param_count()), dq;
    ForwardCache<float> cache;
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        source(batch_rng, cfg.batch, batch);
        const auto y = fqe_targets(batch, q_target, policy, shape, cfg.gamma);
        const std::size_t rows = batch.size;
        critic_inputs(batch.states, batch.actions, batch.goals, shape, rows, in);
        q.forward(in, rows, cache);
        const auto out = cache.output();
        dq.resize(rows);
        double loss = 0.0;
        for (std::size_t b = 0; b < rows; ++b) {
            const double err = double(out[b]) - double(y[b]);
            loss += err * err;
            dq[b] = static_cast<float>(2.0 * err / double(rows));
        }
        if (!std::isfinite(loss)) {
            throw Error(ErrorCode::divergence, "fqe loss not finite at iteration " + std::to_string(it));
        }
        q.backward(cache, dq, grads, {});
        adam_step(q, std::span<const float>(grads), opt);
        if (it % cfg.target_sync == 0) q_target = q;
    }
    if (!q.all_finite()) throw Error(ErrorCode::divergence, "fqe parameters not finite");
    return q;
}

double fqe_score(const Mlp<float>& qnet, const BatchPolicy& policy, std::span<const float> states,
                 std::span<const float> goals, std::size_t rows, const NetShape& shape) {
    if (rows == 0) throw Error(ErrorCode::invalid_input, "fqe_score needs at least one sample");
    std::vector<float> actions;
    policy(states, goals, rows, actions);
    const std::vector<float> s(states.begin(), states.end()), g(goals.begin(), goals.end());
    std::vector<float> in;
    critic_inputs(s, actions, g, shape, rows, in);
    const auto q = qnet.predict(in, rows);
    double sum = 0.0;
    for (float v : q) sum += v;
    return sum / double(rows);
}

ScoreInputs sample_score_inputs(const BatchSampler& sampler, std::size_t n, Rng& rng) {
    if (n == 0) throw Error(ErrorCode::invalid_input, "fqe_score needs at least one sample");
    const auto& ds = sampler.dataset();
    const std::size_t dim = ds.dim();
    ScoreInputs out;
    out.rows = n;
    out.states.resize(n * kStackFrames * dim);
    out.goals.resize(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const StepRef s = sampler.sample_state(rng);
        stack_state(ds.episode(s.episode), s.step,
                    std::span<float>(out.states.data() + i * kStackFrames * dim, kStackFrames * dim));
        const StepRef g = sampler.sample_uniform_goal(rng);
        const auto emb = ds.episode(g.episode).embedding(g.step);
        std::copy(emb.begin(), emb.end(), out.goals.begin() + std::ptrdiff_t(i * dim));
    }
    return out;
}

double evaluate_checkpoint(Checkpoint& ckpt, const BatchSampler& sampler, const FqeConfig& cfg) {
    const auto& ds = sampler.dataset();
    const NetShape shape{kStackFrames * ds.dim(), ds.dim(), ds.action_dims()};
    const auto policy = actor_policy(ckpt.actor, shape);
    const auto q = fqe_train(policy, uniform_goal_source(sampler), shape, cfg);
    // Same evaluation states for every checkpoint so scores are comparable.
    Rng score_rng(derive_seed(cfg.seed, "fqe.score"));
    const auto inputs = sample_score_inputs(sampler, cfg.score_samples, score_rng);
    const double score = fqe_score(q, policy, inputs.states, inputs.goals, inputs.rows, shape);
    ckpt.fqe_score = score;
    return score;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * double(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::dimension_mismatch, "spearman: length mismatch");
    if (xs.size() < 2) throw Error(ErrorCode::invalid_input, "spearman needs at least two points");
    const auto rx = average_ranks(xs), ry = average_ranks(ys);
    const double n = double(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::invalid_input, "spearman undefined: zero rank variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

const Checkpoint& select_best(const std::vector<Checkpoint>& checkpoints) {
    if (checkpoints.empty()) throw Error(ErrorCode::invalid_input, "select_best: no checkpoints");
    const Checkpoint* best = nullptr;
    for (const auto& c : checkpoints) {
        if (!c.fqe_score) throw Error(ErrorCode::invalid_input, "select_best: unscored checkpoint");
        if (!best || *c.fqe_score > *best->fqe_score ||
            (*c.fqe_score == *best->fqe_score && c.step > best->step)) {
            best = &c;
        }
    }
    return *best;
}

}  // namespace minav
