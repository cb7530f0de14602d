#pragma once

// Exploration action processes: white (uniform / Gaussian), Ornstein-Uhlenbeck,
// spectrally shaped pink Gaussian, and pink uniform (pink Gaussian pushed
// through the standard normal CDF and rescaled to the action range).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minav {

enum class NoiseKind { white_uniform, white_gaussian, ou, pink_gaussian, pink_uniform };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct ActionRange {
    double lo = -1.0;
    double hi = 1.0;

    bool operator==(const ActionRange&) const = default;
};

struct NoiseConfig {
    NoiseKind kind = NoiseKind::pink_uniform;
    std::size_t length = 0;
    std::size_t dims = 2;
    double beta = 1.0;
    /// Marginal std of the Gaussian kinds before clamping to the range.
    double sigma = 0.5;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    double ou_x0 = 0.0;
    ActionRange range{};
    std::uint64_t seed = 0;

    void validate() const;
};

/// length x dims samples stored row-major (one row per step).
class NoiseSequence {
public:
    NoiseSequence() = default;
    NoiseSequence(std::size_t length, std::size_t dims, ActionRange range)
        : length_(length), dims_(dims), values_(length * dims, 0.0), ranges_(dims, range) {}

    std::size_t length() const { return length_; }
    std::size_t dims() const { return dims_; }

    double& at(std::size_t t, std::size_t d) { return values_[t * dims_ + d]; }
    double at(std::size_t t, std::size_t d) const { return values_[t * dims_ + d]; }
    std::span<const double> row(std::size_t t) const { return {values_.data() + t * dims_, dims_}; }
    std::vector<double> column(std::size_t d) const;

    const std::vector<double>& values() const { return values_; }
    const ActionRange& range(std::size_t d) const { return ranges_[d]; }
    void set_range(std::size_t d, ActionRange r) { ranges_[d] = r; }

    bool operator==(const NoiseSequence&) const = default;

private:
    std::size_t length_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> values_;
    std::vector<ActionRange> ranges_;
};

/// Standard normal CDF. Throws invalid-input on NaN.
double gaussian_cdf(double x);

/// Zero-mean, unit (population) variance per dimension, one-sided PSD ~ f^-beta.
/// The range recorded on the result is unbounded in spirit; values are not clamped.
NoiseSequence gen_pink_gaussian(std::size_t n, std::size_t dims, double beta, std::uint64_t seed);

/// a = lo + (hi - lo) * Phi(x / sigma). With no sigma the per-dimension
/// empirical standard deviation of the input is used.
NoiseSequence to_pink_uniform(const NoiseSequence& gaussian_stage, std::optional<double> sigma,
                              ActionRange range);

/// Euler-Maruyama OU with unit step: x' = x - theta * x + sigma * xi; clamped to range.
NoiseSequence gen_ou(std::size_t n, std::size_t dims, double theta, double sigma,
                     std::uint64_t seed, double x0 = 0.0, ActionRange range = {});

NoiseSequence gen_white_uniform(std::size_t n, std::size_t dims, ActionRange range,
                                std::uint64_t seed);

NoiseSequence gen_white_gaussian(std::size_t n, std::size_t dims, double sigma,
                                 ActionRange range, std::uint64_t seed);

/// Dispatches on `cfg.kind`; every output lies inside `cfg.range`.
NoiseSequence generate(const NoiseConfig& cfg);

/// Least-squares slope of log10 periodogram vs log10 frequency over the middle
/// two decades of the available band. Requires at least 1024 samples.
double psd_slope(std::span<const double> seq);

/// Header `step,a0,a1,...`, one row per step.
void write_csv(std::ostream& os, const NoiseSequence& seq);

}  // namespace minav
