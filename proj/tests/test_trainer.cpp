#include <doctest.h>

#include <cmath>
#include <random>

#include "minav/error.hpp"
#include "minav/goal_set.hpp"
#include "minav/td3bc.hpp"

using namespace minav;

namespace {

const NetShape kTiny{1, 1, 1};  // scalar state, goal and action

RelabeledBatch one_row(float s, float a, float s2, float g, float r, float d) {
    RelabeledBatch b;
    b.size = 1;
    b.dim = 1;
    b.action_dims = 1;
    b.states = {s};
    b.actions = {a};
    b.next_states = {s2};
    b.goals = {g};
    b.rewards = {r};
    b.dones = {d};
    return b;
}

void set_layer(Mlp<float>& net, std::size_t layer, std::vector<float> w, std::vector<float> b) {
    std::copy(w.begin(), w.end(), net.mutable_weight(layer).begin());
    std::copy(b.begin(), b.end(), net.mutable_bias(layer).begin());
}

double relu(double x) { return x > 0 ? x : 0; }

// Hand-set 2-unit nets: actor [s, g] -> 2 -> 1 (tanh), critics [s, a, g] -> 2 -> 1.
Td3BcNets tiny_nets(const TrainConfig& cfg) {
    Rng rng(0);
    Td3BcNets n = make_td3bc_nets(kTiny, cfg, rng);
    set_layer(n.actor_target, 0, {0.5f, -0.25f, 0.3f, 0.2f}, {0.1f, -0.1f});
    set_layer(n.actor_target, 1, {1.0f, -0.5f}, {0.05f});
    set_layer(n.critic1_target, 0, {0.2f, 0.4f, -0.3f, 0.1f, -0.2f, 0.5f}, {0.0f, 0.2f});
    set_layer(n.critic1_target, 1, {0.7f, 0.3f}, {0.1f});
    set_layer(n.critic2_target, 0, {-0.1f, 0.3f, 0.2f, 0.4f, 0.1f, -0.3f}, {0.3f, 0.0f});
    set_layer(n.critic2_target, 1, {0.5f, -0.6f}, {0.2f});
    n.actor = n.actor_target;
    n.critic1 = n.critic1_target;
    n.critic2 = n.critic2_target;
    return n;
}

double tiny_actor(double s, double g) {
    const double h0 = relu(0.5 * s - 0.25 * g + 0.1), h1 = relu(0.3 * s + 0.2 * g - 0.1);
    return std::tanh(1.0 * h0 - 0.5 * h1 + 0.05);
}
double tiny_q1(double s, double a, double g) {
    const double h0 = relu(0.2 * s + 0.4 * a - 0.3 * g), h1 = relu(0.1 * s - 0.2 * a + 0.5 * g + 0.2);
    return 0.7 * h0 + 0.3 * h1 + 0.1;
}
double tiny_q2(double s, double a, double g) {
    const double h0 = relu(-0.1 * s + 0.3 * a + 0.2 * g + 0.3), h1 = relu(0.4 * s + 0.1 * a - 0.3 * g);
    return 0.5 * h0 - 0.6 * h1 + 0.2;
}

OfflineDataset ring_dataset(std::size_t episodes) {
    OfflineDataset ds(2, 2);
    for (std::size_t e = 0; e < episodes; ++e) {
        Episode ep(2, 2);
        for (int t = 0; t < 30; ++t) {
            const float ang = 0.2f * float(t) + float(e);
            const float v[2] = {std::cos(ang), std::sin(ang)};
            const float a[2] = {std::sin(float(t)), std::cos(float(3 * t))};
            ep.push(v, a, {}, 0.05f);
        }
        ds.add_episode(ep);
    }
    return ds;
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.gradient_steps = 60;
    cfg.batch = 16;
    cfg.hidden = {8};
    cfg.checkpoint_every = 20;
    cfg.seed = 5;
    return cfg;
}

double norm_diff(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("critic targets") {
    TrainConfig cfg;
    cfg.hidden = {2};
    cfg.smoothing_sigma = 0.0;
    const auto nets = tiny_nets(cfg);
    Rng rng(1);

    const auto terminal = one_row(0.3f, 0.1f, 0.8f, -0.4f, 1.0f, 1.0f);
    CHECK(critic_targets(terminal, nets, cfg, rng)[0] == 1.0f);

    const float s2 = 0.8f, g = -0.4f;
    const double a2 = tiny_actor(s2, g);
    const double expect = 0.0 + cfg.gamma * std::min(tiny_q1(s2, a2, g), tiny_q2(s2, a2, g));
    const auto row = one_row(0.3f, 0.1f, s2, g, 0.0f, 0.0f);
    CHECK(critic_targets(row, nets, cfg, rng)[0] == doctest::Approx(expect).epsilon(1e-6));

    TrainConfig myopic = cfg;
    myopic.gamma = 0.0;
    CHECK(critic_targets(row, nets, myopic, rng)[0] == 0.0f);
    CHECK(critic_targets(one_row(0.3f, 0.1f, s2, g, 1.0f, 0.0f), nets, myopic, rng)[0] == 1.0f);
}

TEST_CASE("critic target takes the smaller target critic") {
    TrainConfig cfg;
    cfg.hidden = {2};
    cfg.smoothing_sigma = 0.0;
    Rng rng(2);
    const auto row = one_row(0.1f, 0.0f, 0.5f, 0.2f, 0.0f, 0.0f);
    for (float shift : {5.0f, -5.0f}) {
        auto nets = tiny_nets(cfg);
        nets.critic2_target.mutable_bias(1)[0] += shift;
        const double a2 = tiny_actor(0.5, 0.2);
        const double q1 = tiny_q1(0.5, a2, 0.2), q2 = tiny_q2(0.5, a2, 0.2) + shift;
        CHECK(critic_targets(row, nets, cfg, rng)[0] == doctest::Approx(cfg.gamma * std::min(q1, q2)).epsilon(1e-6));
    }
}

TEST_CASE("target smoothing noise stays clipped") {
    TrainConfig cfg;
    cfg.hidden = {2};
    cfg.smoothing_sigma = 5.0;  // huge sigma, so the clip binds
    cfg.smoothing_clip = 0.1;
    const auto nets = tiny_nets(cfg);
    Rng rng(3);
    const auto row = one_row(0.1f, 0.0f, 0.5f, 0.2f, 0.0f, 0.0f);
    const double a2 = tiny_actor(0.5, 0.2);
    auto f = [](double a) { return std::min(tiny_q1(0.5, a, 0.2), tiny_q2(0.5, a, 0.2)); };
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k <= 2000; ++k) {
        const double v = f(a2 - 0.1 + 0.2 * k / 2000.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    int at_edge = 0;
    for (int i = 0; i < 200; ++i) {
        const double y = critic_targets(row, nets, cfg, rng)[0] / cfg.gamma;
        CHECK(y >= lo - 1e-5);
        CHECK(y <= hi + 1e-5);
        if (std::abs(y - f(a2 - 0.1)) < 1e-5 || std::abs(y - f(a2 + 0.1)) < 1e-5) ++at_edge;
    }
    CHECK(at_edge >= 180);  // |N(0, 5)| < 0.1 has probability ~1.6%
}

TEST_CASE("actor loss on hand-set nets") {
    TrainConfig cfg;
    cfg.hidden = {2};
    cfg.lambda = 0.001;
    const auto nets = tiny_nets(cfg);
    const auto row = one_row(0.3f, -0.6f, 0.0f, 0.7f, 0.0f, 0.0f);
    std::vector<float> grads;
    const auto out = actor_loss_and_grad(row, nets, cfg, grads);
    const double a_hat = tiny_actor(0.3, 0.7);
    const double q = tiny_q1(0.3, a_hat, 0.7);
    const double bc = (a_hat + 0.6) * (a_hat + 0.6);
    CHECK(out.q_term == doctest::Approx(q).epsilon(1e-6));
    CHECK(out.bc_term == doctest::Approx(bc).epsilon(1e-6));
    CHECK(out.loss == doctest::Approx(-q + 0.001 * bc).epsilon(1e-6));
}

TEST_CASE("actor gradient splits into policy-gradient and behaviour-cloning parts") {
    TrainConfig cfg;
    cfg.hidden = {16, 16};
    Rng rng(4);
    const NetShape shape{8, 2, 2};
    auto nets = make_td3bc_nets(shape, cfg, rng);
    RelabeledBatch batch;
    batch.size = 32;
    batch.dim = 2;
    batch.action_dims = 2;
    std::normal_distribution<float> n01;
    auto fill = [&](std::vector<float>& v, std::size_t n) {
        v.resize(n);
        for (auto& x : v) x = n01(rng);
    };
    fill(batch.states, 32 * 8);
    fill(batch.goals, 32 * 2);
    fill(batch.actions, 32 * 2);
    for (auto& a : batch.actions) a = std::tanh(a);

    // lambda = 0: gradient of -mean Q1 only; compare with central differences.
    cfg.lambda = 0.0;
    std::vector<float> g_pg;
    actor_loss_and_grad(batch, nets, cfg, g_pg);
    const double h = 1e-2;
    int checked = 0;
    for (std::size_t i = 0; i < g_pg.size(); i += 7) {
        const float orig = nets.actor.params()[i];
        std::vector<float> tmp;
        nets.actor.mutable_params()[i] = orig + float(h);
        const double up = actor_loss_and_grad(batch, nets, cfg, tmp).loss;
        nets.actor.mutable_params()[i] = orig - float(h);
        const double down = actor_loss_and_grad(batch, nets, cfg, tmp).loss;
        nets.actor.mutable_params()[i] = orig;
        const double fd = (up - down) / (2 * h);
        CHECK(std::abs(fd - g_pg[i]) <= 2e-3 * std::max(1.0, std::abs(fd)));
        ++checked;
    }
    CHECK(checked > 10);

    // Zeroing the critic's output layer makes Q constant; what is left is the
    // behaviour-cloning gradient 2 lambda (a_hat - a) / B through the actor.
    cfg.lambda = 0.001;
    for (auto& w : nets.critic1.mutable_weight(2)) w = 0.0f;
    std::vector<float> g_bc;
    actor_loss_and_grad(batch, nets, cfg, g_bc);
    std::vector<float> in;
    actor_inputs(batch.states, batch.goals, shape, 32, in);
    ForwardCache<float> cache;
    nets.actor.forward(in, 32, cache);
    std::vector<float> d(64), expect(nets.actor.param_count());
    for (std::size_t i = 0; i < 64; ++i) d[i] = float(2.0 * 0.001 * (cache.output()[i] - batch.actions[i]) / 32.0);
    nets.actor.backward(cache, d, expect, {});
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(g_bc[i] == doctest::Approx(expect[i]).epsilon(1e-4));
}

TEST_CASE("target updates are convex steps toward the online nets") {
    TrainConfig cfg;
    cfg.hidden = {8};
    Rng rng(6);
    auto nets = make_td3bc_nets({4, 1, 1}, cfg, rng);
    nets.actor.init_uniform(rng);
    nets.critic1.init_uniform(rng);
    const auto before = std::vector<float>(nets.critic1_target.params().begin(), nets.critic1_target.params().end());
    const double gap = norm_diff(nets.critic1.params(), before);
    update_targets(nets, 0.005);
    const double moved = norm_diff(nets.critic1_target.params(), before);
    CHECK(moved <= 0.005 * gap * (1.0 + 1e-4));
    CHECK(moved == doctest::Approx(0.005 * gap).epsilon(1e-3));
}

TEST_CASE("training schedule, determinism and divergence") {
    const auto ds = ring_dataset(6);
    const auto goals = build_goal_set(ds, 0.02);
    const BatchSampler sampler(ds, goals, RelabelConfig{});

    auto cfg = small_config();
    cfg.gradient_steps = 0;
    CHECK(train_td3bc(sampler, cfg, 1).size() == 1);

    cfg = small_config();
    cfg.gradient_steps = 50;
    const auto a = train_td3bc(sampler, cfg, 7);
    REQUIRE(a.size() == 3);
    CHECK(a[0].step == 0);
    CHECK(a[1].step == 20);
    CHECK(a[2].step == 40);
    for (const auto& c : a) {
        CHECK(c.fingerprint == 7);
        CHECK(c.actor.all_finite());
    }
    const auto b = train_td3bc(sampler, cfg, 7);
    CHECK(a.back().actor == b.back().actor);
    CHECK_FALSE(a.front().actor == a.back().actor);

    std::size_t seen = 0;
    TrainHooks hooks;
    hooks.on_checkpoint = [&](const Checkpoint&) { ++seen; };
    train_td3bc(sampler, cfg, 7, hooks);
    CHECK(seen == 3);

    TrainConfig nan_cfg;
    nan_cfg.hidden = {2};
    auto nets = tiny_nets(nan_cfg);
    auto row = one_row(0.1f, 0.0f, 0.2f, 0.3f, std::nanf(""), 0.0f);
    Rng rng(1);
    try {
        critic_update(row, nets, nan_cfg, rng);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::divergence);
    }

    cfg.batch = 0;
    CHECK_THROWS_AS(train_td3bc(sampler, cfg, 1), Error);
}
