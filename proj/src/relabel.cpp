#include "minav/relabel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "minav/error.hpp"

namespace minav {

void RelabelConfig::validate() const {
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_config, "relabel p must be in [0, 1)");
    if (!(w_geom >= 0.0 && w_geom <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "mixture weight must be in [0, 1]");
    }
    if (!(delta_done > 0.0 && delta_done <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "delta_done must be in (0, 1]");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCode::invalid_config, "gamma must be in [0, 1)");
}

double similarity(std::span<const float> stacked, std::span<const float> goal, bool strict) {
    const std::size_t dim = goal.size();
    if (dim == 0 || stacked.size() != kStackFrames * dim) {
        throw Error(ErrorCode::dimension_mismatch, "stacked state and goal sizes disagree");
    }
    double gg = 0.0;
    for (float v : goal) gg += double(v) * double(v);
    if (strict && std::abs(std::sqrt(gg) - 1.0) > 1e-4) {
        throw Error(ErrorCode::invalid_input, "goal embedding is not unit norm");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < kStackFrames; ++k) {
        const float* f = stacked.data() + k * dim;
        double fg = 0.0, ff = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            fg += double(f[i]) * double(goal[i]);
            ff += double(f[i]) * double(f[i]);
        }
        if (strict && std::abs(std::sqrt(ff) - 1.0) > 1e-4) {
            throw Error(ErrorCode::invalid_input, "stacked frame is not unit norm");
        }
        const double denom = std::sqrt(ff * gg);
        if (!(denom > 0.0)) throw Error(ErrorCode::invalid_input, "zero vector in similarity");
        total += fg / denom;
    }
    return std::clamp(total / static_cast<double>(kStackFrames), -1.0, 1.0);
}

RewardDone reward(double s, double delta_done) {
    const int hit = s >= delta_done ? 1 : 0;
    return {hit, hit};
}

std::size_t sample_geometric_goal(std::size_t t, std::size_t last, double p, Rng& rng) {
    // std::geometric_distribution counts failures before the first success.
    std::geometric_distribution<std::size_t> failures(1.0 - p);
    const std::size_t k = failures(rng) + 1;
    if (t >= last || k >= last - t) return last;
    return t + k;
}

TransitionIndex::TransitionIndex(const OfflineDataset& dataset) {
    prefix_.reserve(dataset.episode_count() + 1);
    prefix_.push_back(0);
    for (const auto& ep : dataset.episodes()) {
        total_ += ep.length() > 0 ? ep.length() - 1 : 0;
        prefix_.push_back(total_);
    }
}

StepRef TransitionIndex::at(std::size_t flat) const {
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), flat);
    const std::size_t e = static_cast<std::size_t>(it - prefix_.begin()) - 1;
    return {static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(flat - prefix_[e])};
}

StepRef TransitionIndex::sample(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, total_ - 1);
    return at(pick(rng));
}

BatchSampler::BatchSampler(const OfflineDataset& dataset, const GoalSet& goals, RelabelConfig cfg)
    : dataset_(dataset), goals_(goals), cfg_(cfg), index_(dataset) {
    cfg_.validate();
    if (goals_.empty()) throw Error(ErrorCode::empty_goal_set, "batch sampling needs goals");
    if (index_.size() == 0) throw Error(ErrorCode::empty_dataset, "dataset has no transitions");
}

StepRef BatchSampler::sample_uniform_goal(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, goals_.size() - 1);
    return goals_.indices[pick(rng)];
}

RelabeledBatch BatchSampler::sample(BatchMode mode, std::size_t batch, Rng& rng) const {
    RelabeledBatch out;
    sample_into(mode, batch, rng, out);
    return out;
}

void BatchSampler::sample_into(BatchMode mode, std::size_t batch, Rng& rng,
                               RelabeledBatch& out) const {
    if (batch == 0) throw Error(ErrorCode::invalid_config, "batch size must be positive");
    const std::size_t dim = dataset_.dim();
    const std::size_t adim = dataset_.action_dims();
    const std::size_t sdim = kStackFrames * dim;
    out.size = batch;
    out.dim = dim;
    out.action_dims = adim;
    out.states.resize(batch * sdim);
    out.next_states.resize(batch * sdim);
    out.actions.resize(batch * adim);
    out.goals.resize(batch * dim);
    out.rewards.resize(batch);
    out.dones.resize(batch);
    out.sources.resize(batch);
    out.transitions.resize(batch);
    out.goal_refs.resize(batch);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double w_geom = mode == BatchMode::critic ? cfg_.w_geom : 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const StepRef tr = index_.sample(rng);
        const Episode& ep = dataset_.episode(tr.episode);
        std::span<float> s{out.states.data() + b * sdim, sdim};
        std::span<float> s2{out.next_states.data() + b * sdim, sdim};
        stack_state(ep, tr.step, s);
        stack_state(ep, tr.step + 1, s2);
        const auto a = ep.action(tr.step);
        std::copy(a.begin(), a.end(), out.actions.begin() + static_cast<std::ptrdiff_t>(b * adim));

        StepRef goal;
        // Draw the coin even in actor mode so both modes consume the stream alike.
        const bool geometric = coin(rng) < w_geom;
        if (geometric) {
            const std::size_t g = sample_geometric_goal(tr.step, ep.length() - 1, cfg_.p, rng);
            goal = {tr.episode, static_cast<std::uint32_t>(g)};
        } else {
            goal = sample_uniform_goal(rng);
        }
        const auto gvec = dataset_.episode(goal.episode).embedding(goal.step);
        std::copy(gvec.begin(), gvec.end(), out.goals.begin() + static_cast<std::ptrdiff_t>(b * dim));

        const double sim = similarity(cfg_.reward_on_next ? std::span<const float>(s2)
                                                          : std::span<const float>(s),
                                      gvec, cfg_.strict_normalization);
        const auto rd = reward(sim, cfg_.delta_done);
        out.rewards[b] = static_cast<float>(rd.reward);
        out.dones[b] = static_cast<float>(rd.done);
        out.sources[b] = geometric ? GoalSource::geometric : GoalSource::uniform;
        out.transitions[b] = tr;
        out.goal_refs[b] = goal;
    }
}

}  // namespace minav
