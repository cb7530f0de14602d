#pragma once

// Run configuration: flat `section.key = value` text. Unknown keys, repeated
// keys and malformed values are hard errors.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "minav/encoder.hpp"
#include "minav/fqe.hpp"
#include "minav/maze.hpp"
#include "minav/noise.hpp"
#include "minav/relabel.hpp"
#include "minav/td3bc.hpp"

namespace minav {

struct CollectConfig {
    std::size_t steps = 7200;
    std::size_t episode_length = 200;
};

struct EvalConfig {
    std::size_t goals = 8;
    std::size_t starts = 5;
    std::size_t max_steps = 80;
    double delta_eval = 0.75;
    double min_start_distance = 2.0;
    std::size_t candidates = 400;
    bool measure_checkpoints = true;  // SR of every checkpoint in the select stage
};

struct ExperimentConfig {
    std::vector<std::string> kinds{"white-uniform", "ou", "pink-gaussian", "pink-uniform"};
    std::size_t seeds = 3;
    std::vector<double> budgets{1.0, 2.0, 3.0};  // multiples of collect.steps
};

struct RunConfig {
    std::string maze = "standard";  // preset name or path to an ASCII maze file
    MazeParams maze_params;
    EncoderConfig encoder;
    NoiseConfig noise;
    CollectConfig collect;
    RelabelConfig relabel;
    TrainConfig train;
    FqeConfig fqe;
    EvalConfig eval;
    ExperimentConfig experiment;
    std::uint64_t seed = 0;

    /// Checks ranges and pushes shared values (gamma, action dims, seeds)
    /// into the sub-configs.
    void finalize();
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every key in a fixed order, one `key = value` per line.
std::string to_config_text(const RunConfig& cfg);
/// FNV-1a of the canonical text.
std::uint64_t config_fingerprint(const RunConfig& cfg);
std::string fingerprint_hex(std::uint64_t fp);

MazeWorld make_world(const RunConfig& cfg);

}  // namespace minav
