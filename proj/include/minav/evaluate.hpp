#pragma once

// Closed-loop evaluation in the maze: goal/start selection, rollouts judged
// by the running stacked-frame similarity, and SR / STL reporting.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "minav/encoder.hpp"
#include "minav/maze.hpp"
#include "minav/mlp.hpp"

namespace minav {

/// One control decision. `state` is the 4-frame stack, `goal` the goal
/// embedding; `pose` is ground truth and only oracle policies may read it.
using StepPolicy = std::function<void(std::span<const float> state, std::span<const float> goal,
                                      const Pose& pose, std::span<double> action)>;

struct EvalTask {
    std::size_t goal_index = 0;
    std::size_t start_index = 0;
    Pose goal;
    Pose start;
    double reference_time = 0.0;  // T* from the shortest-path oracle
};

struct EvalSettings {
    std::size_t max_steps = 80;
    double delta_eval = 0.75;
    double delta_ssd = 0.02;
};

struct TrialLog {
    std::size_t goal = 0;
    std::size_t start = 0;
    bool success = false;
    std::size_t steps = 0;
    double time_s = 0.0;
    double final_sim = 0.0;
    double final_dist_m = 0.0;
    double reference_time = 0.0;
};

struct EvalReport {
    std::vector<TrialLog> trials;
    std::vector<double> per_goal_sr;
    double sr = 0.0;
    double mean_time_s = 0.0;  // over successful trials; 0 when none
    double stl = 0.0;
};

struct TaskConfig {
    std::size_t goals = 8;
    std::size_t starts = 5;
    double min_start_distance = 2.0;  // metres between start and goal
    std::size_t candidates = 400;     // random poses screened for goals
    std::uint64_t seed = 0;
};

/// Spatially spread goals (farthest-point over SSD-valid random poses) and,
/// per goal, reachable starts at least `min_start_distance` away. Headings are
/// 0 when the action space has no rotation, uniform otherwise.
std::vector<EvalTask> make_eval_tasks(const MazeWorld& world, const Encoder& encoder,
                                      const TaskConfig& cfg, double delta_ssd);

/// Runs one trial. Success when the running similarity reaches delta_eval
/// after some step; failures report time max_steps * dt.
TrialLog run_trial(const StepPolicy& policy, const MazeWorld& world, const Encoder& encoder,
                   const EvalTask& task, const EvalSettings& settings);

/// Throws invalid-input when a goal view fails the SSD filter.
EvalReport evaluate_policy(const StepPolicy& policy, const MazeWorld& world, const Encoder& encoder,
                           const std::vector<EvalTask>& tasks, const EvalSettings& settings);

/// Deterministic actor: a = pi([state, goal]).
StepPolicy actor_step_policy(const Mlp<float>& actor);
/// Uniform random actions from its own seeded stream.
StepPolicy random_step_policy(std::size_t action_dims, std::uint64_t seed);
/// Follows shortest-path cell centres to the goal position using ground
/// truth; heading control only when the action space has rotation.
StepPolicy waypoint_oracle_policy(const MazeWorld& world, const Pose& goal);

}  // namespace minav
