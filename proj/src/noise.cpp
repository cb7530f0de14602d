#include "minav/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "minav/error.hpp"
#include "minav/fft.hpp"
#include "minav/rng.hpp"

namespace minav {

namespace {

void check_range(ActionRange r) {
    if (!(r.lo < r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw Error(ErrorCode::invalid_range, "action range requires lo < hi");
    }
}

void check_shape(std::size_t n, std::size_t dims) {
    if (n < 2) throw Error(ErrorCode::invalid_config, "noise length must be >= 2");
    if (dims < 1) throw Error(ErrorCode::invalid_config, "noise dims must be >= 1");
}

std::uint64_t dim_seed(std::uint64_t seed, std::size_t d) { return derive_seed(seed, d); }

void standardize(std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double& v : x) {
        v -= mean;
        ss += v * v;
    }
    const double sd = std::sqrt(ss / n);
    if (sd > 0.0) {
        for (double& v : x) v /= sd;
    }
    // A second centering pass removes the residual rounding in the mean.
    const double residual = std::accumulate(x.begin(), x.end(), 0.0) / n;
    for (double& v : x) v -= residual;
}

std::vector<double> shaped_gaussian(std::size_t n, double beta, std::uint64_t seed) {
    const std::size_t m = next_power_of_two(n);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> spec(m);
    const std::size_t half = m / 2;
    for (std::size_t k = 1; k <= half; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(m);
        const double amp = std::pow(f, -beta / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        if (k == half) {
            spec[k] = {re * amp, 0.0};
        } else {
            spec[k] = {re * amp, im * amp};
            spec[m - k] = std::conj(spec[k]);
        }
    }
    fft_inplace(spec, /*inverse=*/true);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = spec[t].real();
    standardize(out);
    return out;
}

double clamp_to(double v, ActionRange r) { return std::clamp(v, r.lo, r.hi); }

}  // namespace

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::white_uniform: return "white-uniform";
        case NoiseKind::white_gaussian: return "white-gaussian";
        case NoiseKind::ou: return "ou";
        case NoiseKind::pink_gaussian: return "pink-gaussian";
        case NoiseKind::pink_uniform: return "pink-uniform";
    }
    return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
    for (auto k : {NoiseKind::white_uniform, NoiseKind::white_gaussian, NoiseKind::ou,
                   NoiseKind::pink_gaussian, NoiseKind::pink_uniform}) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorCode::invalid_config, "unknown noise kind '" + std::string(name) + "'");
}

void NoiseConfig::validate() const {
    check_shape(length, dims);
    if (!(beta >= 0.0)) throw Error(ErrorCode::invalid_config, "beta must be >= 0");
    if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_config, "sigma must be > 0");
    if (kind == NoiseKind::ou && !(ou_theta > 0.0)) {
        throw Error(ErrorCode::invalid_config, "ou_theta must be > 0");
    }
    check_range(range);
}

std::vector<double> NoiseSequence::column(std::size_t d) const {
    std::vector<double> out(length_);
    for (std::size_t t = 0; t < length_; ++t) out[t] = at(t, d);
    return out;
}

double gaussian_cdf(double x) {
    if (std::isnan(x)) throw Error(ErrorCode::invalid_input, "gaussian_cdf of NaN");
    // erfc keeps full relative precision in the lower tail.
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

NoiseSequence gen_pink_gaussian(std::size_t n, std::size_t dims, double beta, std::uint64_t seed) {
    check_shape(n, dims);
    if (!(beta >= 0.0)) throw Error(ErrorCode::invalid_config, "beta must be >= 0");
    constexpr double inf = std::numeric_limits<double>::infinity();
    NoiseSequence seq(n, dims, ActionRange{-inf, inf});
    for (std::size_t d = 0; d < dims; ++d) {
        const auto col = shaped_gaussian(n, beta, dim_seed(seed, d));
        for (std::size_t t = 0; t < n; ++t) seq.at(t, d) = col[t];
    }
    return seq;
}

NoiseSequence to_pink_uniform(const NoiseSequence& gaussian_stage, std::optional<double> sigma,
                              ActionRange range) {
    check_range(range);
    if (sigma && !(*sigma > 0.0)) throw Error(ErrorCode::invalid_config, "sigma must be > 0");
    const std::size_t n = gaussian_stage.length();
    NoiseSequence out(n, gaussian_stage.dims(), range);
    const double width = range.hi - range.lo;
    for (std::size_t d = 0; d < gaussian_stage.dims(); ++d) {
        double s = 0.0;
        if (sigma) {
            s = *sigma;
        } else {
            double mean = 0.0;
            for (std::size_t t = 0; t < n; ++t) mean += gaussian_stage.at(t, d);
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const double c = gaussian_stage.at(t, d) - mean;
                ss += c * c;
            }
            s = std::sqrt(ss / static_cast<double>(n));
            if (!(s > 0.0)) s = 1.0;
        }
        for (std::size_t t = 0; t < n; ++t) {
            const double u = gaussian_cdf(gaussian_stage.at(t, d) / s);
            out.at(t, d) = clamp_to(range.lo + width * u, range);
        }
    }
    return out;
}

NoiseSequence gen_ou(std::size_t n, std::size_t dims, double theta, double sigma,
                     std::uint64_t seed, double x0, ActionRange range) {
    check_shape(n, dims);
    if (!(theta > 0.0)) throw Error(ErrorCode::invalid_config, "ou_theta must be > 0");
    check_range(range);
    NoiseSequence seq(n, dims, range);
    for (std::size_t d = 0; d < dims; ++d) {
        Rng rng(dim_seed(seed, d));
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = x0;
        for (std::size_t t = 0; t < n; ++t) {
            seq.at(t, d) = x;
            x = x - theta * x + sigma * normal(rng);
        }
        for (std::size_t t = 0; t < n; ++t) seq.at(t, d) = clamp_to(seq.at(t, d), range);
    }
    return seq;
}

NoiseSequence gen_white_uniform(std::size_t n, std::size_t dims, ActionRange range,
                                std::uint64_t seed) {
    check_shape(n, dims);
    check_range(range);
    NoiseSequence seq(n, dims, range);
    for (std::size_t d = 0; d < dims; ++d) {
        Rng rng(dim_seed(seed, d));
        std::uniform_real_distribution<double> unif(range.lo, range.hi);
        for (std::size_t t = 0; t < n; ++t) seq.at(t, d) = clamp_to(unif(rng), range);
    }
    return seq;
}

NoiseSequence gen_white_gaussian(std::size_t n, std::size_t dims, double sigma,
                                 ActionRange range, std::uint64_t seed) {
    check_shape(n, dims);
    check_range(range);
    if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_config, "sigma must be > 0");
    NoiseSequence seq(n, dims, range);
    for (std::size_t d = 0; d < dims; ++d) {
        Rng rng(dim_seed(seed, d));
        std::normal_distribution<double> normal(0.0, sigma);
        for (std::size_t t = 0; t < n; ++t) seq.at(t, d) = clamp_to(normal(rng), range);
    }
    return seq;
}

NoiseSequence generate(const NoiseConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case NoiseKind::white_uniform:
            return gen_white_uniform(cfg.length, cfg.dims, cfg.range, cfg.seed);
        case NoiseKind::white_gaussian:
            return gen_white_gaussian(cfg.length, cfg.dims, cfg.sigma, cfg.range, cfg.seed);
        case NoiseKind::ou:
            return gen_ou(cfg.length, cfg.dims, cfg.ou_theta, cfg.ou_sigma, cfg.seed, cfg.ou_x0,
                          cfg.range);
        case NoiseKind::pink_gaussian: {
            auto seq = gen_pink_gaussian(cfg.length, cfg.dims, cfg.beta, cfg.seed);
            NoiseSequence out(cfg.length, cfg.dims, cfg.range);
            for (std::size_t t = 0; t < cfg.length; ++t) {
                for (std::size_t d = 0; d < cfg.dims; ++d) {
                    out.at(t, d) = clamp_to(cfg.sigma * seq.at(t, d), cfg.range);
                }
            }
            return out;
        }
        case NoiseKind::pink_uniform: {
            auto seq = gen_pink_gaussian(cfg.length, cfg.dims, cfg.beta, cfg.seed);
            return to_pink_uniform(seq, std::nullopt, cfg.range);
        }
    }
    throw Error(ErrorCode::invalid_config, "unhandled noise kind");
}

double psd_slope(std::span<const double> seq) {
    if (seq.size() < 1024) throw Error(ErrorCode::invalid_input, "psd_slope needs >= 1024 samples");
    std::size_t m = 1;
    while (m * 2 <= seq.size()) m *= 2;
    const double mean =
        std::accumulate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(m), 0.0) /
        static_cast<double>(m);
    std::vector<std::complex<double>> buf(m);
    for (std::size_t i = 0; i < m; ++i) buf[i] = seq[i] - mean;
    fft_inplace(buf, false);

    const double lo = std::log10(1.0 / static_cast<double>(m));
    const double hi = std::log10(0.5);
    const double mid = 0.5 * (lo + hi);
    const double band_lo = std::max(lo, mid - 1.0);
    const double band_hi = std::min(hi, mid + 1.0);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t k = 1; k <= m / 2; ++k) {
        const double lf = std::log10(static_cast<double>(k) / static_cast<double>(m));
        if (lf < band_lo || lf > band_hi) continue;
        const double power = std::norm(buf[k]);
        if (power <= 0.0) continue;
        const double lp = std::log10(power);
        sx += lf;
        sy += lp;
        sxx += lf * lf;
        sxy += lf * lp;
        ++count;
    }
    const double c = static_cast<double>(count);
    const double denom = c * sxx - sx * sx;
    if (count < 2 || denom == 0.0) throw Error(ErrorCode::invalid_input, "degenerate spectrum");
    return (c * sxy - sx * sy) / denom;
}

void write_csv(std::ostream& os, const NoiseSequence& seq) {
    os << "step";
    for (std::size_t d = 0; d < seq.dims(); ++d) os << ",a" << d;
    os << '\n';
    os.precision(17);
    for (std::size_t t = 0; t < seq.length(); ++t) {
        os << t;
        for (std::size_t d = 0; d < seq.dims(); ++d) os << ',' << seq.at(t, d);
        os << '\n';
    }
}

}  // namespace minav
