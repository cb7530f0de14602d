#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "minav/checkpoint.hpp"
#include "minav/error.hpp"
#include "minav/mlp.hpp"

using namespace minav;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> n01;
    std::vector<double> v(n);
    for (auto& x : v) x = scale * n01(rng);
    return v;
}

double weighted_output(const Mlp<double>& net, const std::vector<double>& x, const std::vector<double>& c,
                       std::size_t rows) {
    const auto y = net.predict(x, rows);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += c[i] * y[i];
    return s;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-7, std::abs(a) + std::abs(b)); }

// Central differences of L = sum c * net(x) against backward(), for every
// parameter and every input coordinate.
double max_fd_error(Mlp<double> net, const std::vector<double>& x, std::size_t rows, Rng& rng) {
    const double h = 1e-5;
    const auto c = random_vec(rows * net.output_dim(), rng);
    ForwardCache<double> cache;
    net.forward(x, rows, cache);
    std::vector<double> grads(net.param_count()), dx(x.size());
    net.backward(cache, c, grads, dx);

    double worst = 0.0;
    for (std::size_t i = 0; i < net.param_count(); ++i) {
        const double orig = net.params()[i];
        net.mutable_params()[i] = orig + h;
        const double up = weighted_output(net, x, c, rows);
        net.mutable_params()[i] = orig - h;
        const double down = weighted_output(net, x, c, rows);
        net.mutable_params()[i] = orig;
        worst = std::max(worst, rel_err(grads[i], (up - down) / (2 * h)));
    }
    auto xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double up = weighted_output(net, xp, c, rows);
        xp[i] = x[i] - h;
        const double down = weighted_output(net, xp, c, rows);
        xp[i] = x[i];
        worst = std::max(worst, rel_err(dx[i], (up - down) / (2 * h)));
    }
    return worst;
}

}  // namespace

TEST_CASE("forward on hand-set nets") {
    Mlp<double> zero({3, 4, 2}, OutputHead::identity);
    const auto y0 = zero.predict(std::vector<double>{1, 2, 3}, 1);
    CHECK(y0 == std::vector<double>{0, 0});

    Mlp<double> ident({3, 3}, OutputHead::identity);
    for (std::size_t i = 0; i < 3; ++i) ident.mutable_weight(0)[i * 3 + i] = 1.0;
    CHECK(ident.predict(std::vector<double>{0.5, -2, 7}, 1) == std::vector<double>{0.5, -2, 7});

    // 2-2-1: h = relu([1 -1; 2 1] x + [0, -1]), y = [3 -2] h + 0.5
    Mlp<double> net({2, 2, 1}, OutputHead::identity);
    const double w0[] = {1, -1, 2, 1}, b0[] = {0, -1}, w1[] = {3, -2}, b1[] = {0.5};
    std::copy(w0, w0 + 4, net.mutable_weight(0).begin());
    std::copy(b0, b0 + 2, net.mutable_bias(0).begin());
    std::copy(w1, w1 + 2, net.mutable_weight(1).begin());
    std::copy(b1, b1 + 1, net.mutable_bias(1).begin());
    // x = (2, 1): pre = (1, 4), h = (1, 4), y = 3 - 8 + 0.5
    CHECK(net.predict(std::vector<double>{2, 1}, 1)[0] == doctest::Approx(-4.5));
    // x = (-1, 0.5): pre = (-1.5, -2.5), h = 0, y = 0.5
    CHECK(net.predict(std::vector<double>{-1, 0.5}, 1)[0] == doctest::Approx(0.5));

    CHECK_THROWS_AS(net.predict(std::vector<double>{1, 2, 3}, 1), Error);
}

TEST_CASE("finite-difference gradients for every role") {
    Rng rng(12);
    const std::size_t d = 8, pa = 2;
    struct Role {
        const char* name;
        std::vector<std::size_t> dims;
        OutputHead head;
    };
    const Role roles[] = {
        {"actor", {5 * d, 24, 24, pa}, OutputHead::tanh},
        {"critic", {5 * d + pa, 24, 24, 1}, OutputHead::identity},
        {"fqe", {5 * d + pa, 16, 16, 1}, OutputHead::identity},
    };
    for (const auto& role : roles) {
        CAPTURE(role.name);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            Mlp<double> net(role.dims, role.head);
            net.init_uniform(rng);
            const auto x = random_vec(role.dims.front(), rng);
            worst = std::max(worst, max_fd_error(net, x, 1, rng));
        }
        CHECK(worst < 1e-4);
        MESSAGE(role.name << " max relative error " << worst);
    }
}

TEST_CASE("linear net with squared loss has the closed-form gradient") {
    Rng rng(2);
    Mlp<double> net({3, 2}, OutputHead::identity);
    net.init_uniform(rng);
    const std::vector<double> x{0.3, -1.2, 2.0}, target{0.5, -0.5};
    ForwardCache<double> cache;
    net.forward(x, 1, cache);
    std::vector<double> dy(2);
    for (int o = 0; o < 2; ++o) dy[o] = 2.0 * (cache.output()[o] - target[o]);
    std::vector<double> grads(net.param_count());
    net.backward(cache, dy, grads, {});
    for (int o = 0; o < 2; ++o) {
        double wx = net.bias(0)[o];
        for (int i = 0; i < 3; ++i) wx += net.weight(0)[o * 3 + i] * x[i];
        for (int i = 0; i < 3; ++i) CHECK(grads[o * 3 + i] == doctest::Approx(2.0 * (wx - target[o]) * x[i]));
        CHECK(grads[6 + o] == doctest::Approx(2.0 * (wx - target[o])));
    }
}

TEST_CASE("zero upstream gradient and stale caches") {
    Rng rng(3);
    Mlp<float> net({4, 8, 2}, OutputHead::tanh);
    net.init_uniform(rng);
    std::vector<float> x(12, 0.3f);
    ForwardCache<float> cache;
    net.forward(x, 3, cache);
    std::vector<float> zero(6, 0.0f), grads(net.param_count(), 1.0f);
    net.backward(cache, zero, grads, {});
    for (float g : grads) CHECK(g == 0.0f);
    for (float y : cache.output()) CHECK(std::abs(y) < 1.0f);

    net.mutable_params()[0] += 1.0f;
    CHECK_THROWS_AS(net.backward(cache, zero, grads, {}), Error);
    Mlp<float> other = net;
    net.forward(x, 3, cache);
    CHECK_THROWS_AS(other.backward(cache, zero, grads, {}), Error);
}

TEST_CASE("adam") {
    Mlp<double> net({1, 1}, OutputHead::identity);
    AdamState<double> opt(net.param_count(), 1e-3);
    const std::vector<double> g{0.37, -2.0};
    const auto before = std::vector<double>(net.params().begin(), net.params().end());
    adam_step(net, std::span<const double>(g), opt);
    for (std::size_t i = 0; i < 2; ++i) {
        const double step = std::abs(net.params()[i] - before[i]);
        const double expect = 1e-3 * std::abs(g[i]) / (std::abs(g[i]) + 1e-8 * std::sqrt(1.0 - 0.999));
        CHECK(step == doctest::Approx(expect).epsilon(1e-9));
    }

    Mlp<double> still({3, 2}, OutputHead::identity);
    Rng rng(1);
    still.init_uniform(rng);
    const auto p0 = std::vector<double>(still.params().begin(), still.params().end());
    AdamState<double> o2(still.param_count(), 1e-2);
    const std::vector<double> zeros(still.param_count(), 0.0);
    for (int i = 0; i < 50; ++i) adam_step(still, std::span<const double>(zeros), o2);
    CHECK(std::equal(p0.begin(), p0.end(), still.params().begin()));

    const std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(adam_step(still, std::span<const double>(wrong), o2), Error);

    // Two identical runs give identical trajectories.
    auto run = [] {
        Rng r(8);
        Mlp<float> n({3, 5, 1}, OutputHead::identity);
        n.init_uniform(r);
        AdamState<float> o(n.param_count(), 1e-2);
        std::vector<float> gr(n.param_count());
        for (int i = 0; i < 20; ++i) {
            for (std::size_t k = 0; k < gr.size(); ++k) gr[k] = std::sin(float(i * 31 + k));
            adam_step(n, std::span<const float>(gr), o);
        }
        return std::vector<float>(n.params().begin(), n.params().end());
    };
    CHECK(run() == run());
}

TEST_CASE("polyak") {
    Mlp<double> target({2, 1}, OutputHead::identity), online({2, 1}, OutputHead::identity);
    for (auto& p : online.mutable_params()) p = 2.0;
    polyak_update(target, online, 0.0);
    for (double p : target.params()) CHECK(p == 0.0);
    polyak_update(target, online, 0.5);
    for (double p : target.params()) CHECK(p == 1.0);
    polyak_update(target, online, 1.0);
    CHECK(target == online);
    CHECK_THROWS_AS(polyak_update(target, online, 1.5), Error);
    Mlp<double> other({3, 1}, OutputHead::identity);
    CHECK_THROWS_AS(polyak_update(other, online, 0.5), Error);
}

TEST_CASE("checkpoint files") {
    Rng rng(4);
    Checkpoint c;
    c.actor = Mlp<float>({10, 6, 2}, OutputHead::tanh);
    c.actor.init_uniform(rng);
    c.step = 3000;
    c.fingerprint = 0xfeedbeefcafe1234ull;
    c.fqe_score = 0.125;
    const auto bytes = serialize_checkpoint(c);
    const auto back = deserialize_checkpoint(bytes);
    CHECK(back.actor == c.actor);
    CHECK(back.step == 3000);
    CHECK(back.fingerprint == c.fingerprint);
    CHECK(*back.fqe_score == 0.125);

    const auto path = std::filesystem::temp_directory_path() / checkpoint_filename(3000);
    CHECK(path.filename() == "ckpt_3000.bin");
    save_checkpoint(c, path.string());
    CHECK(load_checkpoint(path.string()).actor == c.actor);
    std::filesystem::remove(path);

    auto bad = bytes;
    bad[bad.size() / 2] ^= 1;
    CHECK_THROWS_AS(deserialize_checkpoint(bad), Error);
    bad = bytes;
    bad[0] = 'Z';
    CHECK_THROWS_AS(deserialize_checkpoint(bad), Error);
    CHECK_THROWS_AS(deserialize_checkpoint(std::span<const std::uint8_t>(bytes.data(), 20)), Error);
}

TEST_CASE("float and double instantiations agree") {
    Rng rng(6);
    Mlp<double> d({6, 7, 3}, OutputHead::tanh);
    d.init_uniform(rng);
    const auto f = d.cast<float>();
    const std::vector<double> x{0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
    const std::vector<float> xf(x.begin(), x.end());
    const auto yd = d.predict(x, 1);
    const auto yf = f.predict(xf, 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(yf[i] == doctest::Approx(yd[i]).epsilon(1e-5));
    CHECK(f.all_finite());
}
