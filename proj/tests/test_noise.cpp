#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "minav/error.hpp"
#include "minav/noise.hpp"

using namespace minav;

namespace {

// Maclaurin series of erf in long double; converges for the moderate
// arguments used here.
long double erf_series(long double x) {
    long double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    return 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
}

double ks_uniform(std::vector<double> v, double lo, double hi) {
    std::sort(v.begin(), v.end());
    const double n = double(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = (v[i] - lo) / (hi - lo);
        d = std::max({d, std::abs(f - double(i) / n), std::abs(double(i + 1) / n - f)});
    }
    return d;
}

double lag1_autocorr(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - m) * (v[i] - m);
        if (i + 1 < v.size()) num += (v[i] - m) * (v[i + 1] - m);
    }
    return num / den;
}

// Periodogram at a handful of log-spaced bins by direct summation, then a
// least-squares fit; shares nothing with the FFT path.
double direct_slope(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> lf, lp;
    for (double e = std::log10(double(n) / 1000.0); e <= std::log10(double(n) / 10.0); e += 0.01) {
        const std::size_t k = std::size_t(std::pow(10.0, e));
        if (!lf.empty() && std::log10(double(k) / double(n)) == lf.back()) continue;
        std::complex<double> s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            s += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k) * double(t) / double(n));
        }
        lf.push_back(std::log10(double(k) / double(n)));
        lp.push_back(std::log10(std::norm(s)));
    }
    const double mx = std::accumulate(lf.begin(), lf.end(), 0.0) / double(lf.size());
    const double my = std::accumulate(lp.begin(), lp.end(), 0.0) / double(lp.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lf.size(); ++i) {
        sxy += (lf[i] - mx) * (lp[i] - my);
        sxx += (lf[i] - mx) * (lf[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("gaussian_cdf") {
    CHECK(gaussian_cdf(0.0) == 0.5);
    const double x = 1.959964;
    const double oracle = double(0.5L * (1.0L + erf_series(x / std::sqrt(2.0L))));
    CHECK(std::abs(gaussian_cdf(x) - oracle) < 1e-12);
    CHECK(std::abs(gaussian_cdf(x) - 0.975) < 1e-6);
    for (double v : {-3.0, -1.2, -0.3, 0.4, 2.5}) {
        CHECK(std::abs(gaussian_cdf(v) - double(0.5L * (1.0L + erf_series(v / std::sqrt(2.0L))))) < 1e-7);
    }
    // Mills-ratio asymptotic expansion for the far tail.
    const double z = 8.0;
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double tail = phi / z * (1.0 - 1.0 / (z * z) + 3.0 / std::pow(z, 4) - 15.0 / std::pow(z, 6));
    CHECK(gaussian_cdf(-z) < 1e-14);
    CHECK(std::abs(gaussian_cdf(-z) - tail) / tail < 1e-3);
    double prev = 0.0;
    for (double v = -6.0; v <= 6.0; v += 0.01) {
        const double c = gaussian_cdf(v);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(gaussian_cdf(std::nan("")), Error);
}

TEST_CASE("pink gaussian stage: spectrum and standardisation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto seq = gen_pink_gaussian(1 << 16, 1, 1.0, seed);
        const auto col = seq.column(0);
        const double slope = psd_slope(col);
        CHECK(slope >= -1.15);
        CHECK(slope <= -0.85);
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / double(col.size());
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= double(col.size());
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
    const auto white = gen_pink_gaussian(1 << 16, 1, 0.0, 5).column(0);
    CHECK(std::abs(psd_slope(white)) < 0.1);

    const auto brown = gen_pink_gaussian(1 << 16, 1, 2.0, 6).column(0);
    CHECK(std::abs(psd_slope(brown) + 2.0) < 0.2);
    CHECK(std::abs(direct_slope(brown) + 2.0) < 0.2);
}

TEST_CASE("pink gaussian errors, determinism and odd lengths") {
    CHECK_THROWS_AS(gen_pink_gaussian(1, 1, 1.0, 0), Error);
    CHECK_THROWS_AS(gen_pink_gaussian(100, 1, -0.5, 0), Error);
    CHECK(gen_pink_gaussian(1000, 2, 1.0, 9) == gen_pink_gaussian(1000, 2, 1.0, 9));
    const auto odd = gen_pink_gaussian(1000, 3, 1.0, 4);
    CHECK(odd.length() == 1000);
    CHECK(odd.dims() == 3);
    // Per-dimension sub-seeds: columns differ.
    CHECK(odd.column(0) != odd.column(1));
}

TEST_CASE("pink uniform: marginals, ranks, bounds") {
    const auto g = gen_pink_gaussian(100000, 2, 1.0, 11);
    const auto u = to_pink_uniform(g, std::nullopt, {0.0, 1.0});
    for (std::size_t d = 0; d < 2; ++d) {
        const auto col = u.column(d);
        CHECK(ks_uniform(col, 0.0, 1.0) < 0.02);
        const auto gc = g.column(d);
        std::vector<std::size_t> a(col.size()), b(col.size());
        std::iota(a.begin(), a.end(), 0);
        std::iota(b.begin(), b.end(), 0);
        std::stable_sort(a.begin(), a.end(), [&](auto i, auto j) { return col[i] < col[j]; });
        std::stable_sort(b.begin(), b.end(), [&](auto i, auto j) { return gc[i] < gc[j]; });
        CHECK(a == b);
        for (double v : col) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    NoiseSequence zero(4, 1, {-10.0, 10.0});
    const auto mid = to_pink_uniform(zero, 1.0, {-1.0, 1.0});
    CHECK(mid.at(0, 0) == 0.0);
    CHECK_THROWS_AS(to_pink_uniform(g, std::nullopt, {1.0, 1.0}), Error);
}

TEST_CASE("ou process") {
    const double theta = 0.15, sigma = 0.2;
    const auto seq = gen_ou(1000000, 1, theta, sigma, 21, 0.0, {-100.0, 100.0}).column(0);
    const double mean = std::accumulate(seq.begin(), seq.end(), 0.0) / double(seq.size());
    double var = 0.0;
    for (double v : seq) var += (v - mean) * (v - mean);
    var /= double(seq.size());
    const double stationary = sigma * sigma / (2.0 * theta - theta * theta);
    CHECK(std::abs(var - stationary) / stationary < 0.05);
    CHECK(std::abs(lag1_autocorr(seq) - (1.0 - theta)) / (1.0 - theta) < 0.02);

    const auto decay = gen_ou(20, 1, 0.5, 0.0, 1, 0.8, {-1.0, 1.0});
    for (std::size_t t = 0; t < 20; ++t) CHECK(decay.at(t, 0) == doctest::Approx(0.8 * std::pow(0.5, double(t))));
    CHECK_THROWS_AS(gen_ou(10, 1, 0.0, 0.2, 1), Error);
    const auto clamped = gen_ou(10000, 2, 0.01, 1.0, 3);
    for (double v : clamped.values()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("white uniform") {
    const auto big = gen_white_uniform(1000000, 1, {-1.0, 1.0}, 5).column(0);
    CHECK(std::abs(lag1_autocorr(big)) < 0.01);
    const auto u = gen_white_uniform(100000, 1, {0.0, 1.0}, 6).column(0);
    CHECK(ks_uniform(u, 0.0, 1.0) < 0.02);
    CHECK(gen_white_uniform(500, 2, {}, 8) == gen_white_uniform(500, 2, {}, 8));
    CHECK_THROWS_AS(gen_white_uniform(10, 1, {1.0, -1.0}, 0), Error);
}

TEST_CASE("generate dispatch keeps every kind inside the range") {
    for (auto kind : {NoiseKind::white_uniform, NoiseKind::white_gaussian, NoiseKind::ou, NoiseKind::pink_gaussian,
                      NoiseKind::pink_uniform}) {
        NoiseConfig cfg;
        cfg.kind = kind;
        cfg.length = 5000;
        cfg.dims = 3;
        cfg.seed = 42;
        const auto seq = generate(cfg);
        CHECK(seq.length() == 5000);
        for (double v : seq.values()) {
            CHECK(std::isfinite(v));
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        CHECK(seq == generate(cfg));
        CHECK(parse_noise_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_noise_kind("violet"), Error);
    NoiseConfig bad;
    bad.length = 1;
    CHECK_THROWS_AS(generate(bad), Error);
}

TEST_CASE("psd_slope input checks and csv") {
    std::vector<double> short_seq(1000, 0.0);
    CHECK_THROWS_AS(psd_slope(short_seq), Error);
    std::ostringstream os;
    write_csv(os, gen_white_uniform(3, 2, {}, 1));
    const auto text = os.str();
    CHECK(text.rfind("step,a0,a1\n0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
