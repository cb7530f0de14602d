#pragma once

// Histogram coverage entropy and the time-weighted success metric.

#include <cstddef>
#include <span>
#include <vector>

#include "minav/dataset.hpp"
#include "minav/maze.hpp"

namespace minav {

struct EntropyResult {
    double eta = 0.0;
    double bins = 0.0;  // K, the total number of grid cells (may exceed 2^64)
    std::size_t n = 0;
    std::vector<double> widths;  // per-dimension bin width
    std::vector<std::size_t> bins_per_dim;
};

/// Row-major samples (n x p) binned on a grid with width range_d * n^(-1/p)
/// per dimension; the plug-in entropy over occupied bins is divided by
/// min(log2 K, log2 n). Values outside [lo, hi] fall into the edge bins.
EntropyResult normalized_entropy(std::span<const double> samples, std::size_t p,
                                 std::span<const double> lo, std::span<const double> hi);

struct EntropyReport {
    double eta_s = 0.0, eta_a = 0.0, eta_sa = 0.0;
    double k_s = 0.0, k_a = 0.0, k_sa = 0.0;
    std::size_t n = 0;
    std::vector<double> delta_s, delta_a, delta_sa;
};

/// eta over (x, y), over actions, and over their concatenation. Position
/// ranges are the maze extents and action ranges are [-1, 1].
EntropyReport coverage_report(const OfflineDataset& dataset, const MazeWorld& world);
/// Same, with position ranges taken from the data.
EntropyReport coverage_report(const OfflineDataset& dataset);

/// (1/N) sum S_i T*_i / max(T_i, T*_i). Throws on length mismatch or T* <= 0.
double stl(std::span<const int> successes, std::span<const double> times,
           std::span<const double> reference_times);

}  // namespace minav
