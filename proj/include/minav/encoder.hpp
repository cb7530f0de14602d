#pragma once

// Frozen synthetic visual encoder. Rays cast across the field of view are turned
// into a patch grid (rows = depth bands, columns = rays), each patch projected
// by one fixed seeded matrix and L2-normalised. Pooling and the spatial
// standard deviation (SSD) both read the same grid.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minav/maze.hpp"

namespace minav {

struct EncoderConfig {
    std::size_t patch_rows = 4;
    std::size_t patch_cols = 8;
    std::size_t dim = 32;
    double fov_deg = 120.0;
    double max_range = 6.0;
    double crop_fraction = 0.5;
    double delta_ssd = 0.02;
    /// Sinusoid pairs encoding the hit point on the wall. Fewer than ~12 lets
    /// distant views alias above the 0.75 success threshold.
    std::size_t hit_frequencies = 12;
    /// Angular frequencies of the hit-point sinusoids are drawn in
    /// [0.5, 1.5] * hit_frequency_scale rad/m.
    double hit_frequency_scale = 2.0;
    /// Sinusoid pairs of the ray depth, at angular frequencies
    /// hit_frequency_scale * (1, 2, ...) rad/m.
    std::size_t depth_frequencies = 1;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t raw_features() const { return 2 + 2 * hit_frequencies + 2 * depth_frequencies; }
};

class PatchGrid {
public:
    PatchGrid() = default;
    PatchGrid(std::size_t rows, std::size_t cols, std::size_t dim)
        : rows_(rows), cols_(cols), dim_(dim), data_(rows * cols * dim, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t dim() const { return dim_; }

    std::span<double> patch(std::size_t r, std::size_t c) {
        return {data_.data() + (r * cols_ + c) * dim_, dim_};
    }
    std::span<const double> patch(std::size_t r, std::size_t c) const {
        return {data_.data() + (r * cols_ + c) * dim_, dim_};
    }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const PatchGrid&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0, dim_ = 0;
    std::vector<double> data_;
};

struct Embedding {
    std::vector<float> vector;  // unit L2 norm
    double ssd = 0.0;
};

/// Mean of the patches, L2-normalised; `ssd` comes from spatial_std.
/// Throws degenerate-embedding when the mean vanishes.
Embedding pool(const PatchGrid& grid, double crop_fraction);

/// Per-dimension population std across the patches of the centre crop,
/// averaged over dimensions. Throws invalid-config when the crop is smaller
/// than one patch along either axis.
double spatial_std(const PatchGrid& grid, double crop_fraction);

class Encoder {
public:
    explicit Encoder(EncoderConfig cfg);

    const EncoderConfig& config() const { return cfg_; }
    std::size_t dim() const { return cfg_.dim; }

    PatchGrid encode(const MazeWorld& world, const Pose& pose) const;
    /// Grid from precomputed rays (one per column).
    PatchGrid encode_hits(std::span<const RayHit> hits) const;
    Embedding embed(const MazeWorld& world, const Pose& pose) const;

    /// Projection matrix, dim x raw_features, row-major. Fixed by the seed.
    const std::vector<double>& projection() const { return projection_; }

private:
    EncoderConfig cfg_;
    std::vector<double> projection_;
    std::vector<double> band_edges_log_;
    double band_width_log_ = 1.0;
    std::vector<double> freq_x_, freq_y_, phase_;
};

}  // namespace minav
