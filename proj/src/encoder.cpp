#include "minav/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "minav/error.hpp"
#include "minav/rng.hpp"

namespace minav {

namespace {

constexpr double kMinBandDepth = 0.1;

struct Crop {
    std::size_t r0, r1, c0, c1;  // half-open
};

Crop centre_crop(const PatchGrid& grid, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "crop_fraction must be in (0, 1]");
    }
    const auto keep = [fraction](std::size_t n) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
    };
    const std::size_t kr = keep(grid.rows()), kc = keep(grid.cols());
    if (kr < 1 || kc < 1) throw Error(ErrorCode::invalid_config, "crop smaller than one patch");
    const std::size_t r0 = (grid.rows() - kr) / 2, c0 = (grid.cols() - kc) / 2;
    return {r0, r0 + kr, c0, c0 + kc};
}

void normalize(std::span<double> v) {
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double n = std::sqrt(ss);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
}

}  // namespace

void EncoderConfig::validate() const {
    if (patch_rows < 1 || patch_cols < 1 || dim < 1) {
        throw Error(ErrorCode::invalid_config, "encoder grid and dim must be positive");
    }
    if (!(fov_deg > 0.0 && fov_deg < 360.0)) {
        throw Error(ErrorCode::invalid_config, "fov_deg must be in (0, 360)");
    }
    if (!(max_range > kMinBandDepth)) {
        throw Error(ErrorCode::invalid_config, "max_range must exceed the first depth band");
    }
    if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "crop_fraction must be in (0, 1]");
    }
    if (!(delta_ssd >= 0.0)) throw Error(ErrorCode::invalid_config, "delta_ssd must be >= 0");
}

double spatial_std(const PatchGrid& grid, double crop_fraction) {
    const Crop crop = centre_crop(grid, crop_fraction);
    const std::size_t dim = grid.dim();
    const double count = static_cast<double>((crop.r1 - crop.r0) * (crop.c1 - crop.c0));
    std::vector<double> mean(dim, 0.0), sq(dim, 0.0);
    for (std::size_t r = crop.r0; r < crop.r1; ++r) {
        for (std::size_t c = crop.c0; c < crop.c1; ++c) {
            const auto p = grid.patch(r, c);
            for (std::size_t k = 0; k < dim; ++k) mean[k] += p[k];
        }
    }
    for (double& m : mean) m /= count;
    for (std::size_t r = crop.r0; r < crop.r1; ++r) {
        for (std::size_t c = crop.c0; c < crop.c1; ++c) {
            const auto p = grid.patch(r, c);
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = p[k] - mean[k];
                sq[k] += d * d;
            }
        }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < dim; ++k) total += std::sqrt(sq[k] / count);
    return total / static_cast<double>(dim);
}

Embedding pool(const PatchGrid& grid, double crop_fraction) {
    const std::size_t dim = grid.dim();
    std::vector<double> mean(dim, 0.0);
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        for (std::size_t c = 0; c < grid.cols(); ++c) {
            const auto p = grid.patch(r, c);
            for (std::size_t k = 0; k < dim; ++k) mean[k] += p[k];
        }
    }
    const double count = static_cast<double>(grid.rows() * grid.cols());
    double ss = 0.0;
    for (double& m : mean) {
        m /= count;
        ss += m * m;
    }
    const double norm = std::sqrt(ss);
    if (!(norm > 1e-12)) throw Error(ErrorCode::degenerate_embedding, "pooled patch mean is zero");
    Embedding e;
    e.vector.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) e.vector[k] = static_cast<float>(mean[k] / norm);
    e.ssd = spatial_std(grid, crop_fraction);
    return e;
}

Encoder::Encoder(EncoderConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t f = cfg_.raw_features();
    Rng rng(derive_seed(cfg_.seed, "encoder.projection"));
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(f)));
    projection_.resize(cfg_.dim * f);
    for (double& w : projection_) w = normal(rng);

    Rng frng(derive_seed(cfg_.seed, "encoder.hit_frequencies"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < cfg_.hit_frequencies; ++j) {
        const double mag = cfg_.hit_frequency_scale * (0.5 + unit(frng));
        const double dir = 2.0 * std::numbers::pi * unit(frng);
        freq_x_.push_back(mag * std::cos(dir));
        freq_y_.push_back(mag * std::sin(dir));
        phase_.push_back(2.0 * std::numbers::pi * unit(frng));
    }

    // Far edges of the depth bands, log-spaced up to max_range.
    const double span = std::log(cfg_.max_range / kMinBandDepth);
    band_width_log_ = span / static_cast<double>(cfg_.patch_rows);
    for (std::size_t h = 0; h < cfg_.patch_rows; ++h) {
        band_edges_log_.push_back(std::log(kMinBandDepth) +
                                  band_width_log_ * static_cast<double>(h + 1));
    }
}

PatchGrid Encoder::encode_hits(std::span<const RayHit> hits) const {
    if (hits.size() != cfg_.patch_cols) {
        throw Error(ErrorCode::dimension_mismatch, "one ray per patch column required");
    }
    const std::size_t f = cfg_.raw_features();
    PatchGrid grid(cfg_.patch_rows, cfg_.patch_cols, cfg_.dim);
    std::vector<double> raw(f);
    for (std::size_t w = 0; w < cfg_.patch_cols; ++w) {
        const RayHit& hit = hits[w];
        const double depth = std::max(hit.depth, 1e-6);
        raw[1] = 2.0 * std::min(depth / cfg_.max_range, 1.0) - 1.0;
        for (std::size_t j = 0; j < cfg_.hit_frequencies; ++j) {
            const double arg = freq_x_[j] * hit.hit_x + freq_y_[j] * hit.hit_y + phase_[j];
            raw[2 + 2 * j] = std::sin(arg);
            raw[3 + 2 * j] = std::cos(arg);
        }
        const std::size_t depth_base = 2 + 2 * cfg_.hit_frequencies;
        for (std::size_t j = 0; j < cfg_.depth_frequencies; ++j) {
            const double arg = cfg_.hit_frequency_scale * static_cast<double>(j + 1) * depth;
            raw[depth_base + 2 * j] = std::sin(arg);
            raw[depth_base + 2 * j + 1] = std::cos(arg);
        }
        for (std::size_t h = 0; h < cfg_.patch_rows; ++h) {
            // Soft indicator that the wall lies within band h's reach: 1 well
            // inside the far edge, 0 well beyond it, linear in log-depth between.
            const double reach =
                std::clamp(0.5 + (band_edges_log_[h] - std::log(depth)) / band_width_log_, 0.0, 1.0);
            raw[0] = 2.0 * reach - 1.0;
            auto out = grid.patch(h, w);
            for (std::size_t k = 0; k < cfg_.dim; ++k) {
                const double* row = projection_.data() + k * f;
                double acc = 0.0;
                for (std::size_t i = 0; i < f; ++i) acc += row[i] * raw[i];
                out[k] = acc;
            }
            normalize(out);
        }
    }
    return grid;
}

PatchGrid Encoder::encode(const MazeWorld& world, const Pose& pose) const {
    const double fov = cfg_.fov_deg * std::numbers::pi / 180.0;
    const auto hits = cast_rays(world, pose, cfg_.patch_cols, fov, cfg_.max_range);
    return encode_hits(hits);
}

Embedding Encoder::embed(const MazeWorld& world, const Pose& pose) const {
    return pool(encode(world, pose), cfg_.crop_fraction);
}

}  // namespace minav
